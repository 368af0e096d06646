//! Problem and solution data model shared by every solver, plus the JSON
//! file schema.
//!
//! Integers are carried as decimal strings on disk so that no precision is
//! lost; matrices are row-major arrays of arrays. The `kind` field selects
//! the problem family:
//!
//! ```json
//! {"kind": "uss", "a": ["3", "5"], "b": "8"}
//! {"kind": "ilpe", "A": [["1", "0"], ["0", "1"]], "b": ["2", "3"]}
//! {"kind": "hilp", "A1": [...], "b1": [...], "A2": [...], "b2": [...]}
//! ```

use crate::arith::{dot, parse_int, Int};
use crate::matrix::Matrix;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weight #{index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: Int },
    #[error("target must be non-negative, got {0}")]
    NegativeTarget(Int),
    #[error("malformed instance: {0}")]
    Shape(String),
    #[error("could not parse instance: {0}")]
    Parse(String),
}

/// Unbounded subset sum: find `x >= 0` with `sum a_i x_i = b`.
///
/// Weights are kept strictly increasing. The weights the caller supplied
/// are remembered through `origin`, which maps each input position to the
/// index of its (possibly merged) normalized weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UssInstance {
    a: Vec<Int>,
    b: Int,
    origin: Vec<usize>,
}

impl UssInstance {
    pub fn new(raw: Vec<Int>, b: Int) -> Result<Self, InstanceError> {
        normalize_uss(raw, b)
    }

    pub fn from_i64(raw: &[i64], b: i64) -> Result<Self, InstanceError> {
        Self::new(raw.iter().map(|&v| Int::from(v)).collect(), Int::from(b))
    }

    /// Normalized weights, strictly increasing.
    pub fn weights(&self) -> &[Int] {
        &self.a
    }

    pub fn target(&self) -> &Int {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// For each input position, the index of its normalized weight.
    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    /// The weights in the order (and multiplicity) they were supplied.
    pub fn raw_weights(&self) -> Vec<Int> {
        self.origin.iter().map(|&i| self.a[i].clone()).collect()
    }

    /// Maps a solution over the normalized weights back to input order. A
    /// merged weight's count lands on its first input occurrence.
    pub fn lift(&self, x: &[Int]) -> Vec<Int> {
        assert_eq!(x.len(), self.n());
        let mut seen = vec![false; self.n()];
        self.origin
            .iter()
            .map(|&i| {
                if seen[i] {
                    Int::zero()
                } else {
                    seen[i] = true;
                    x[i].clone()
                }
            })
            .collect()
    }

    /// Maps an input-order solution onto the normalized weights by summing
    /// the counts of merged duplicates.
    pub fn project(&self, raw_x: &[Int]) -> Result<Vec<Int>, InstanceError> {
        if raw_x.len() != self.origin.len() {
            return Err(InstanceError::DimensionMismatch {
                expected: self.origin.len(),
                got: raw_x.len(),
            });
        }
        let mut x = vec![Int::zero(); self.n()];
        for (v, &i) in raw_x.iter().zip(&self.origin) {
            x[i] += v;
        }
        Ok(x)
    }

    /// Builds an instance from weights already known to be strictly
    /// increasing and positive.
    pub(crate) fn from_sorted(a: Vec<Int>, b: Int) -> UssInstance {
        debug_assert!(a.windows(2).all(|w| w[0] < w[1]));
        let origin = (0..a.len()).collect();
        UssInstance { a, b, origin }
    }
}

/// Sorts the weights ascending and merges duplicates, remembering where each
/// input weight went.
pub fn normalize_uss(raw: Vec<Int>, b: Int) -> Result<UssInstance, InstanceError> {
    if raw.is_empty() {
        return Err(InstanceError::Shape("USS instance needs at least one weight".into()));
    }
    if let Some((index, value)) = raw.iter().enumerate().find(|(_, v)| !v.is_positive()) {
        return Err(InstanceError::NonPositiveWeight {
            index,
            value: value.clone(),
        });
    }
    if b.is_negative() {
        return Err(InstanceError::NegativeTarget(b));
    }
    let mut a = raw.clone();
    a.sort();
    a.dedup();
    let origin = raw
        .iter()
        .map(|v| a.binary_search(v).expect("weight present after dedup"))
        .collect();
    Ok(UssInstance { a, b, origin })
}

/// Integer program with equalities: `A x = b`, `x >= 0` integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpeInstance {
    pub a: Matrix,
    pub b: Vec<Int>,
}

impl IlpeInstance {
    pub fn new(a: Matrix, b: Vec<Int>) -> Result<Self, InstanceError> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(InstanceError::Shape("ILPE matrix must be at least 1x1".into()));
        }
        if a.rows() != b.len() {
            return Err(InstanceError::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        Ok(IlpeInstance { a, b })
    }

    pub fn from_i64(rows: &[&[i64]], b: &[i64]) -> Result<Self, InstanceError> {
        Self::new(Matrix::from_i64(rows), b.iter().map(|&v| Int::from(v)).collect())
    }

    pub fn d(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }
}

/// Integer program with inequalities: `A x <= b`, `x >= 0` integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpInstance {
    pub a: Matrix,
    pub b: Vec<Int>,
}

impl IlpInstance {
    pub fn new(a: Matrix, b: Vec<Int>) -> Result<Self, InstanceError> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(InstanceError::Shape("ILP matrix must be at least 1x1".into()));
        }
        if a.rows() != b.len() {
            return Err(InstanceError::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        Ok(IlpInstance { a, b })
    }
}

/// Mixed system: `A1 x <= b1`, `A2 x = b2`, `x >= 0` integral. Either block
/// may have zero rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilpInstance {
    pub a1: Matrix,
    pub b1: Vec<Int>,
    pub a2: Matrix,
    pub b2: Vec<Int>,
}

impl HilpInstance {
    pub fn new(a1: Matrix, b1: Vec<Int>, a2: Matrix, b2: Vec<Int>) -> Result<Self, InstanceError> {
        if a1.rows() > 0 && a2.rows() > 0 && a1.cols() != a2.cols() {
            return Err(InstanceError::DimensionMismatch {
                expected: a1.cols(),
                got: a2.cols(),
            });
        }
        if a1.rows() != b1.len() {
            return Err(InstanceError::DimensionMismatch {
                expected: a1.rows(),
                got: b1.len(),
            });
        }
        if a2.rows() != b2.len() {
            return Err(InstanceError::DimensionMismatch {
                expected: a2.rows(),
                got: b2.len(),
            });
        }
        let n = a1.cols().max(a2.cols());
        if n == 0 {
            return Err(InstanceError::Shape("HILP instance has no variables".into()));
        }
        // An empty block parsed from `[]` has no column count; give it one.
        let a1 = if a1.rows() == 0 { Matrix::zeros(0, n) } else { a1 };
        let a2 = if a2.rows() == 0 { Matrix::zeros(0, n) } else { a2 };
        Ok(HilpInstance { a1, b1, a2, b2 })
    }

    pub fn n(&self) -> usize {
        self.a1.cols().max(self.a2.cols())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Uss(UssInstance),
    Ilpe(IlpeInstance),
    Ilp(IlpInstance),
    Hilp(HilpInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Uss(_) => "uss",
            Instance::Ilpe(_) => "ilpe",
            Instance::Ilp(_) => "ilp",
            Instance::Hilp(_) => "hilp",
        }
    }

    /// Number of variables a solution must have. For USS this is the number
    /// of weights as supplied (before merging).
    pub fn num_vars(&self) -> usize {
        match self {
            Instance::Uss(u) => u.origin.len(),
            Instance::Ilpe(p) => p.n(),
            Instance::Ilp(p) => p.a.cols(),
            Instance::Hilp(p) => p.n(),
        }
    }

    /// Exact check of non-negativity and of the defining (in)equalities.
    /// USS solutions are given in input order.
    pub fn verify(&self, x: &[Int]) -> Result<bool, InstanceError> {
        if x.len() != self.num_vars() {
            return Err(InstanceError::DimensionMismatch {
                expected: self.num_vars(),
                got: x.len(),
            });
        }
        if x.iter().any(Signed::is_negative) {
            return Ok(false);
        }
        Ok(match self {
            Instance::Uss(u) => &dot(&u.raw_weights(), x) == u.target(),
            Instance::Ilpe(p) => p.a.mul_vec(x) == p.b,
            Instance::Ilp(p) => p.a.mul_vec(x).iter().zip(&p.b).all(|(l, r)| l <= r),
            Instance::Hilp(p) => {
                p.a1.mul_vec(x).iter().zip(&p.b1).all(|(l, r)| l <= r) && p.a2.mul_vec(x) == p.b2
            }
        })
    }

    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
        file.into_instance()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&InstanceFile::from_instance(self))
            .expect("instance serialization cannot fail");
        s.push('\n');
        s
    }
}

/// `verify_solution` over any instance kind; see [`Instance::verify`].
pub fn verify_solution(instance: &Instance, x: &[Int]) -> Result<bool, InstanceError> {
    instance.verify(x)
}

/// A non-negative integer assignment. `verified` is only ever set by
/// [`Solution::checked`], after an exact recomputation of the instance's
/// constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub x: Vec<Int>,
    verified: bool,
}

impl Solution {
    /// Verifies `x` against `instance`; fails if `x` does not solve it.
    pub fn checked(instance: &Instance, x: Vec<Int>) -> Result<Solution, InstanceError> {
        if instance.verify(&x)? {
            Ok(Solution { x, verified: true })
        } else {
            Err(InstanceError::Shape("assignment does not satisfy the instance".into()))
        }
    }

    pub fn unchecked(x: Vec<Int>) -> Solution {
        Solution { x, verified: false }
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn to_json(&self) -> String {
        let file = SolutionFile {
            x: self.x.iter().cloned().map(Dec).collect(),
            verified: self.verified,
        };
        let mut s = serde_json::to_string(&file).expect("solution serialization cannot fail");
        s.push('\n');
        s
    }

    /// Parses a solution file. The stored `verified` flag is not trusted;
    /// the result is always unverified.
    pub fn from_json(text: &str) -> Result<Solution, InstanceError> {
        let file: SolutionFile =
            serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
        Ok(Solution::unchecked(file.x.into_iter().map(|d| d.0).collect()))
    }
}

/// Decimal-string integer on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dec(pub Int);

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Dec;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal integer string")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Dec, E> {
                parse_int(v).map(Dec).map_err(E::custom)
            }
        }
        d.deserialize_str(V)
    }
}

pub fn decs(v: &[Int]) -> Vec<Dec> {
    v.iter().cloned().map(Dec).collect()
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<Dec>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(Dec).collect()).collect()
}

fn undec(v: Vec<Dec>) -> Vec<Int> {
    v.into_iter().map(|d| d.0).collect()
}

fn matrix_from_rows(rows: Vec<Vec<Dec>>, name: &str) -> Result<Matrix, InstanceError> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(InstanceError::Shape(format!("matrix {name} has ragged rows")));
    }
    Ok(Matrix::from_rows(rows.into_iter().map(undec).collect()))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum InstanceFile {
    Uss {
        a: Vec<Dec>,
        b: Dec,
    },
    Ilpe {
        #[serde(rename = "A")]
        a: Vec<Vec<Dec>>,
        b: Vec<Dec>,
    },
    Ilp {
        #[serde(rename = "A")]
        a: Vec<Vec<Dec>>,
        b: Vec<Dec>,
    },
    Hilp {
        #[serde(rename = "A1")]
        a1: Vec<Vec<Dec>>,
        b1: Vec<Dec>,
        #[serde(rename = "A2")]
        a2: Vec<Vec<Dec>>,
        b2: Vec<Dec>,
    },
}

impl InstanceFile {
    fn from_instance(inst: &Instance) -> InstanceFile {
        match inst {
            Instance::Uss(u) => InstanceFile::Uss {
                a: decs(&u.raw_weights()),
                b: Dec(u.b.clone()),
            },
            Instance::Ilpe(p) => InstanceFile::Ilpe {
                a: matrix_rows(&p.a),
                b: decs(&p.b),
            },
            Instance::Ilp(p) => InstanceFile::Ilp {
                a: matrix_rows(&p.a),
                b: decs(&p.b),
            },
            Instance::Hilp(p) => InstanceFile::Hilp {
                a1: matrix_rows(&p.a1),
                b1: decs(&p.b1),
                a2: matrix_rows(&p.a2),
                b2: decs(&p.b2),
            },
        }
    }

    fn into_instance(self) -> Result<Instance, InstanceError> {
        Ok(match self {
            InstanceFile::Uss { a, b } => Instance::Uss(normalize_uss(undec(a), b.0)?),
            InstanceFile::Ilpe { a, b } => {
                Instance::Ilpe(IlpeInstance::new(matrix_from_rows(a, "A")?, undec(b))?)
            }
            InstanceFile::Ilp { a, b } => {
                Instance::Ilp(IlpInstance::new(matrix_from_rows(a, "A")?, undec(b))?)
            }
            InstanceFile::Hilp { a1, b1, a2, b2 } => Instance::Hilp(HilpInstance::new(
                matrix_from_rows(a1, "A1")?,
                undec(b1),
                matrix_from_rows(a2, "A2")?,
                undec(b2),
            )?),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    x: Vec<Dec>,
    verified: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn verify_uss_examples() {
        let inst = Instance::Uss(UssInstance::from_i64(&[3, 5], 8).unwrap());
        assert!(inst.verify(&ints(&[1, 1])).unwrap());
        assert!(!inst.verify(&ints(&[-1, 2])).unwrap());
        assert!(matches!(
            inst.verify(&ints(&[1])),
            Err(InstanceError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn verify_ilpe_identity() {
        let inst = Instance::Ilpe(IlpeInstance::from_i64(&[&[1, 0], &[0, 1]], &[2, 3]).unwrap());
        assert!(inst.verify(&ints(&[2, 3])).unwrap());
        assert!(!inst.verify(&ints(&[3, 2])).unwrap());
    }

    #[test]
    fn verify_inequality_kinds() {
        let ilp = Instance::Ilp(IlpInstance::new(Matrix::from_i64(&[&[2, 1]]), ints(&[5])).unwrap());
        assert!(ilp.verify(&ints(&[1, 3])).unwrap());
        assert!(!ilp.verify(&ints(&[2, 2])).unwrap());
        let hilp = Instance::Hilp(
            HilpInstance::new(
                Matrix::from_i64(&[&[1, 1]]),
                ints(&[4]),
                Matrix::from_i64(&[&[1, -1]]),
                ints(&[0]),
            )
            .unwrap(),
        );
        assert!(hilp.verify(&ints(&[2, 2])).unwrap());
        assert!(!hilp.verify(&ints(&[3, 3])).unwrap());
        assert!(!hilp.verify(&ints(&[2, 1])).unwrap());
    }

    #[test]
    fn normalize_merges_and_sorts() {
        let u = UssInstance::from_i64(&[5, 3, 3], 8).unwrap();
        assert_eq!(u.weights(), &ints(&[3, 5])[..]);
        assert_eq!(u.target(), &Int::from(8));
        assert_eq!(u.origin(), &[1, 0, 0]);
        assert_eq!(u.lift(&ints(&[1, 1])), ints(&[1, 1, 0]));
        assert_eq!(u.project(&ints(&[1, 2, 3])).unwrap(), ints(&[5, 1]));

        let single = UssInstance::from_i64(&[7], 0).unwrap();
        assert_eq!(single.weights(), &ints(&[7])[..]);

        let evens = UssInstance::from_i64(&[2, 4, 6], 5).unwrap();
        assert_eq!(evens.weights(), &ints(&[2, 4, 6])[..]);
    }

    #[test]
    fn normalize_rejects_bad_weights() {
        assert!(matches!(
            UssInstance::from_i64(&[3, 0], 8),
            Err(InstanceError::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            UssInstance::from_i64(&[-2], 8),
            Err(InstanceError::NonPositiveWeight { index: 0, .. })
        ));
        assert!(matches!(UssInstance::from_i64(&[2], -1), Err(InstanceError::NegativeTarget(_))));
    }

    #[test]
    fn json_schema_field_names() {
        let text = r#"{"kind":"ilpe","A":[["1","0"],["0","-1"]],"b":["+2","-3"]}"#;
        let inst = Instance::from_json(text).unwrap();
        let Instance::Ilpe(p) = &inst else { panic!() };
        assert_eq!(p.b, ints(&[2, -3]));
        let back = inst.to_json();
        assert!(back.contains("\"A\""));
        assert!(back.contains("\"-1\""));
        assert_eq!(Instance::from_json(&back).unwrap(), inst);
    }

    #[test]
    fn json_rejects_numbers_and_bad_kinds() {
        assert!(Instance::from_json(r#"{"kind":"uss","a":[3,5],"b":"8"}"#).is_err());
        assert!(Instance::from_json(r#"{"kind":"lp","A":[],"b":[]}"#).is_err());
        assert!(Instance::from_json(r#"{"kind":"ilpe","A":[["1"],["2","3"]],"b":["1","1"]}"#).is_err());
    }

    #[test]
    fn hilp_with_empty_inequality_block() {
        let text = r#"{"kind":"hilp","A1":[],"b1":[],"A2":[["1","2"]],"b2":["3"]}"#;
        let Instance::Hilp(h) = Instance::from_json(text).unwrap() else { panic!() };
        assert_eq!(h.a1.rows(), 0);
        assert_eq!(h.a1.cols(), 2);
    }

    #[test]
    fn solution_json() {
        let inst = Instance::Uss(UssInstance::from_i64(&[3, 5], 8).unwrap());
        let s = Solution::checked(&inst, ints(&[1, 1])).unwrap();
        assert_eq!(s.to_json(), "{\"x\":[\"1\",\"1\"],\"verified\":true}\n");
        let back = Solution::from_json(&s.to_json()).unwrap();
        assert_eq!(back.x, s.x);
        assert!(!back.is_verified());
        assert!(Solution::checked(&inst, ints(&[2, 1])).is_err());
    }
}
