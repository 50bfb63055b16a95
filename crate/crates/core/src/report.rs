use std::fmt;

use serde::{Deserialize, Serialize};

use crate::series::Mismatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// Outcome of comparing two bi-graded series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub first_mismatch: Option<Mismatch>,
}

impl CheckReport {
    pub fn from_mismatch(check: &str, mismatch: Option<Mismatch>) -> Self {
        CheckReport {
            check: check.to_string(),
            status: Status::from_bool(mismatch.is_none()),
            first_mismatch: mismatch,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_mismatch {
            None => write!(f, "{} {}", self.status, self.check),
            Some(m) => write!(
                f,
                "{} {}: first mismatch at q^{} z^{}: {} != {}",
                self.status, self.check, m.d, m.z, m.lhs, m.rhs
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::FieldScalar;

    #[test]
    fn json_shape() {
        let pass = CheckReport::from_mismatch("pf", None);
        assert_eq!(
            serde_json::to_string(&pass).unwrap(),
            r#"{"check":"pf","status":"pass","first_mismatch":null}"#
        );
        assert_eq!(pass.to_string(), "PASS pf");
        let fail = CheckReport::from_mismatch(
            "pf",
            Some(Mismatch {
                d: 1,
                z: -1,
                lhs: FieldScalar::from_int(2),
                rhs: FieldScalar::rational(1, 2).unwrap(),
            }),
        );
        assert_eq!(
            serde_json::to_string(&fail).unwrap(),
            r#"{"check":"pf","status":"fail","first_mismatch":{"d":1,"z":-1,"lhs":"2","rhs":"1/2"}}"#
        );
    }
}
