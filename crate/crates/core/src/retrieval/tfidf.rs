use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Document, RetrievalResult, Retriever};
use crate::text::terms;
use crate::{Error, Result};

/// TF-IDF vectors over lowercased alphanumeric terms, compared by cosine.
///
/// Term frequency is the raw count and `idf = ln(N / (1 + df)) + 1`.
#[derive(Clone, Debug)]
pub struct TfIdfIndex {
    docs: Vec<Document>,
    by_id: BTreeMap<String, usize>,
    idf: BTreeMap<String, f64>,
    vectors: Vec<BTreeMap<String, f64>>,
    norms: Vec<f64>,
}

fn term_counts(text: &str) -> BTreeMap<String, f64> {
    let mut tf = BTreeMap::new();
    for t in terms(text) {
        *tf.entry(t).or_insert(0.0) += 1.0;
    }
    tf
}

fn norm(v: &BTreeMap<String, f64>) -> f64 {
    libm::sqrt(v.values().map(|x| x * x).sum())
}

impl TfIdfIndex {
    pub fn build(docs: Vec<Document>) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::invalid("cannot index an empty corpus"));
        }
        let mut by_id = BTreeMap::new();
        for (i, d) in docs.iter().enumerate() {
            if by_id.insert(d.doc_id.clone(), i).is_some() {
                return Err(Error::InvalidArgument(alloc::format!("duplicate doc_id {}", d.doc_id)));
            }
        }
        let counts: Vec<_> = docs.iter().map(|d| term_counts(&d.text)).collect();
        let mut df: BTreeMap<String, f64> = BTreeMap::new();
        for tf in &counts {
            for term in tf.keys() {
                *df.entry(term.clone()).or_insert(0.0) += 1.0;
            }
        }
        let n = docs.len() as f64;
        let idf: BTreeMap<String, f64> = df
            .into_iter()
            .map(|(t, d)| (t, libm::log(n / (1.0 + d)) + 1.0))
            .collect();
        let vectors: Vec<BTreeMap<String, f64>> = counts
            .into_iter()
            .map(|tf| tf.into_iter().map(|(t, c)| { let w = c * idf[&t]; (t, w) }).collect())
            .collect();
        let norms = vectors.iter().map(norm).collect();
        Ok(Self {
            docs,
            by_id,
            idf,
            vectors,
            norms,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    /// TF-IDF weights of a document, or of arbitrary text against this
    /// index's idf table (unknown terms dropped).
    pub fn vector(&self, text: &str) -> BTreeMap<String, f64> {
        term_counts(text)
            .into_iter()
            .filter_map(|(t, c)| self.idf.get(&t).map(|w| (t, c * w)))
            .collect()
    }

    pub fn doc_vector(&self, doc_id: &str) -> Option<&BTreeMap<String, f64>> {
        self.by_id.get(doc_id).map(|&i| &self.vectors[i])
    }

    /// Cosine similarity of every document to `text`, in corpus order.
    pub fn scores(&self, text: &str) -> Vec<f64> {
        let q = self.vector(text);
        let qn = norm(&q);
        self.vectors
            .iter()
            .zip(&self.norms)
            .map(|(v, &dn)| {
                if qn == 0.0 || dn == 0.0 {
                    return 0.0;
                }
                let dot: f64 = q.iter().filter_map(|(t, w)| v.get(t).map(|x| w * x)).sum();
                dot / (qn * dn)
            })
            .collect()
    }
}

impl Retriever for TfIdfIndex {
    fn retrieve(&self, question: &str, count: usize) -> Result<RetrievalResult> {
        if count > self.docs.len() {
            return Err(Error::InsufficientCorpus {
                needed: count,
                available: self.docs.len(),
            });
        }
        let scores = self.scores(question);
        let mut order: Vec<usize> = (0..self.docs.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .total_cmp(&scores[a])
                .then_with(|| self.docs[a].doc_id.cmp(&self.docs[b].doc_id))
        });
        order.truncate(count);
        Ok(RetrievalResult {
            ranked: order.iter().map(|&i| self.docs[i].doc_id.clone()).collect(),
            scores: order.iter().map(|&i| scores[i]).collect(),
        })
    }

    fn document(&self, doc_id: &str) -> Option<&Document> {
        self.by_id.get(doc_id).map(|&i| &self.docs[i])
    }

    fn len(&self) -> usize {
        self.docs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;
    use proptest::prelude::*;

    fn doc(id: &str, text: &str) -> Document {
        Document::new(id, text, id)
    }

    #[test]
    fn single_document_weights_are_idf_times_count() {
        let idx = TfIdfIndex::build(vec![doc("a", "x y y")]).unwrap();
        let idf = libm::log(1.0 / 2.0) + 1.0;
        let v = idx.doc_vector("a").unwrap();
        assert!((v["x"] - idf).abs() < 1e-12);
        assert!((v["y"] - 2.0 * idf).abs() < 1e-12);
    }

    #[test]
    fn disjoint_documents_are_orthogonal() {
        let idx = TfIdfIndex::build(vec![doc("a", "red green"), doc("b", "blue yellow")]).unwrap();
        assert_eq!(idx.scores("blue yellow")[0], 0.0);
        assert!(idx.scores("blue yellow")[1] > 0.99);
    }

    #[test]
    fn reindexing_is_deterministic() {
        let docs = vec![doc("a", "one two two"), doc("b", "two three")];
        let a = TfIdfIndex::build(docs.clone()).unwrap();
        let b = TfIdfIndex::build(docs).unwrap();
        assert_eq!(a.doc_vector("a"), b.doc_vector("a"));
        assert_eq!(a.scores("two"), b.scores("two"));
    }

    #[test]
    fn self_match_ranks_first() {
        let idx = TfIdfIndex::build(vec![
            doc("a", "the great gatsby is a novel"),
            doc("b", "moby dick is a novel about a whale"),
            doc("c", "the great barrier reef"),
        ])
        .unwrap();
        let r = idx.retrieve("moby dick is a novel about a whale", 3).unwrap();
        assert_eq!(r.ranked[0], "b");
        assert!(r.scores.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn unrelated_question_falls_back_to_id_order() {
        let idx = TfIdfIndex::build(vec![doc("c", "x"), doc("a", "y"), doc("b", "z")]).unwrap();
        let r = idx.retrieve("nothing shared", 3).unwrap();
        assert_eq!(r.ranked, vec!["a", "b", "c"]);
        assert_eq!(r.scores, vec![0.0; 3]);
    }

    /// Hand-checkable three-document corpus: brute-force cosine from the
    /// formula, independent of the index internals.
    #[test]
    fn engineered_ranking_matches_brute_force() {
        let texts = [("d1", "apple apple banana"), ("d2", "apple cherry"), ("d3", "banana banana cherry date")];
        let n = 3.0;
        let df = |t: &str| texts.iter().filter(|(_, x)| x.split(' ').any(|w| w == t)).count() as f64;
        let idf = |t: &str| libm::log(n / (1.0 + df(t))) + 1.0;
        let vec_of = |text: &str| {
            let mut v: Vec<(String, f64)> = Vec::new();
            for w in text.split(' ') {
                match v.iter_mut().find(|(t, _)| t == w) {
                    Some((_, c)) => *c += 1.0,
                    None => v.push((String::from(w), 1.0)),
                }
            }
            v.into_iter().map(|(t, c)| { let w = c * idf(&t); (t, w) }).collect::<Vec<_>>()
        };
        let cos = |a: &[(String, f64)], b: &[(String, f64)]| {
            let dot: f64 = a.iter().map(|(t, x)| b.iter().find(|(u, _)| u == t).map_or(0.0, |(_, y)| x * y)).sum();
            let na = libm::sqrt(a.iter().map(|(_, x)| x * x).sum());
            let nb = libm::sqrt(b.iter().map(|(_, x)| x * x).sum());
            dot / (na * nb)
        };
        let q = vec_of("apple banana");
        let mut expected: Vec<(&str, f64)> = texts.iter().map(|(id, t)| (*id, cos(&q, &vec_of(t)))).collect();
        expected.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));

        let idx = TfIdfIndex::build(texts.iter().map(|(id, t)| doc(id, t)).collect()).unwrap();
        let r = idx.retrieve("apple banana", 3).unwrap();
        assert_eq!(r.ranked, expected.iter().map(|e| e.0).collect::<Vec<_>>());
        assert_eq!(r.ranked, vec!["d1", "d3", "d2"]);
        for (got, (_, want)) in r.scores.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_documents() {
        let idx = TfIdfIndex::build(vec![doc("a", "x")]).unwrap();
        assert_eq!(
            idx.retrieve("x", 2),
            Err(Error::InsufficientCorpus { needed: 2, available: 1 })
        );
        assert!(TfIdfIndex::build(vec![]).is_err());
        assert!(TfIdfIndex::build(vec![doc("a", "x"), doc("a", "y")]).is_err());
    }

    proptest! {
        /// A document sharing no term with the question stays out of the
        /// top set, provided the top set is clearly separated.
        #[test]
        fn zero_similarity_document_does_not_enter(
            texts in prop::collection::vec(prop::collection::vec(0u8..12, 1..8), 3..10),
            question in prop::collection::vec(0u8..12, 1..4),
            count in 1usize..3,
        ) {
            let render = |ws: &[u8]| ws.iter().map(|w| format!("w{w}")).collect::<Vec<_>>().join(" ");
            let docs: Vec<Document> = texts.iter().enumerate().map(|(i, t)| doc(&format!("d{i:02}"), &render(t))).collect();
            let q = render(&question);
            let idx = TfIdfIndex::build(docs.clone()).unwrap();
            let before = idx.retrieve(&q, docs.len()).unwrap();
            prop_assume!(before.scores[count - 1] > 0.0);
            prop_assume!(before.scores[count - 1] - before.scores.get(count).copied().unwrap_or(0.0) > 0.05);
            let mut more = docs.clone();
            more.push(doc("d00-new", "zz1 zz2 zz3"));
            let after = TfIdfIndex::build(more).unwrap().retrieve(&q, count).unwrap();
            let mut a = before.ranked[..count].to_vec();
            let mut b = after.ranked.clone();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }
    }
}
