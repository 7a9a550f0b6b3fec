//! Embeddings between generated semigroups induced by a map of letters.

use serde::Serialize;

use crate::alphabet::Letter;
use crate::semigroup::{Element, FiniteSemigroup};

/// Why a letter map does not induce an injective homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingFailure {
    /// A letter of the small semigroup has no image letter.
    UnmappedLetter {
        letter: String,
    },
    /// The image letter is not in the big semigroup's alphabet.
    UnknownTargetLetter {
        letter: String,
    },
    /// The small semigroup has an identity but the big one does not.
    NoIdentityInTarget,
    /// Two words equal in the small semigroup have different images.
    NotWellDefined {
        letter: String,
        element: Element,
    },
    NotHomomorphism {
        x: Element,
        y: Element,
    },
    NotInjective {
        x: Element,
        y: Element,
        image: Element,
    },
}

/// `λ(x)` for every element `x` of the small semigroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub images: Vec<Element>,
}

/// Extends `letter_map` (small letter name -> big letter name) to
/// `λ = ψ_big ∘ i ∘ ψ_small⁻¹` along the small semigroup's witness words and
/// checks that the result is well defined, multiplicative and injective.
pub fn find_embedding<F>(
    small: &FiniteSemigroup,
    big: &FiniteSemigroup,
    letter_map: F,
) -> Result<Embedding, EmbeddingFailure>
where
    F: Fn(&str) -> Option<String>,
{
    let mut target: Vec<Letter> = Vec::with_capacity(small.alphabet().len());
    for name in small.alphabet().letters() {
        let image = letter_map(name).ok_or_else(|| EmbeddingFailure::UnmappedLetter {
            letter: name.clone(),
        })?;
        let b = big
            .alphabet()
            .index_of(&image)
            .ok_or(EmbeddingFailure::UnknownTargetLetter { letter: image })?;
        target.push(b);
    }

    let mut images = Vec::with_capacity(small.order());
    for x in small.elements() {
        let word: Vec<Letter> = small.witness(x).iter().map(|&a| target[a]).collect();
        let image = big
            .eval_letters(&word)
            .map_err(|_| EmbeddingFailure::NoIdentityInTarget)?;
        images.push(image);
    }
    if let (Some(one), Some(big_one)) = (small.identity(), big.identity()) {
        if images[one as usize] != big_one {
            return Err(EmbeddingFailure::NotWellDefined {
                letter: String::new(),
                element: one,
            });
        }
    }

    // letters sharing an image in `small` must share one in `big`
    for (a, &b) in target.iter().enumerate() {
        let x = small.generator(a);
        if images[x as usize] != big.generator(b) {
            return Err(EmbeddingFailure::NotWellDefined {
                letter: small.alphabet().name(a).to_string(),
                element: x,
            });
        }
    }
    for x in small.elements() {
        for y in small.elements() {
            if images[small.mul(x, y) as usize] != big.mul(images[x as usize], images[y as usize]) {
                return Err(EmbeddingFailure::NotHomomorphism { x, y });
            }
        }
    }
    let mut preimage = vec![None; big.order()];
    for x in small.elements() {
        let img = images[x as usize];
        if let Some(y) = preimage[img as usize] {
            return Err(EmbeddingFailure::NotInjective {
                x: y,
                y: x,
                image: img,
            });
        }
        preimage[img as usize] = Some(x);
    }
    Ok(Embedding { images })
}

/// The identity letter map, for alphabets related by inclusion.
pub fn inclusion(name: &str) -> Option<String> {
    Some(name.to_string())
}
