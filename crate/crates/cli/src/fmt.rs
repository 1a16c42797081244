//! Deterministic number and JSON formatting.
//!
//! Every float in a data file is written with 17 significant digits so that
//! values round-trip exactly and reruns are byte-identical.

/// 17-significant-digit scientific representation.
pub fn f(x: f64) -> String {
    if x == 0.0 {
        // normalize -0.0 for byte determinism
        return "0.0e0".into();
    }
    format!("{x:.16e}")
}

/// Minimal JSON writer for the fixed report schemas. Levels track whether a
/// separator is needed; keys mark the next value as already-prefixed.
pub struct Json {
    buf: String,
    has_item: Vec<bool>,
    pending_key: bool,
}

impl Json {
    pub fn new() -> Self {
        Self {
            buf: String::new(),
            has_item: Vec::new(),
            pending_key: false,
        }
    }

    fn prefix(&mut self) {
        if self.pending_key {
            self.pending_key = false;
            return;
        }
        if let Some(top) = self.has_item.last_mut() {
            if *top {
                self.buf.push(',');
            }
            *top = true;
        }
    }

    pub fn key(&mut self, key: &str) -> &mut Self {
        self.prefix();
        self.buf.push('"');
        self.buf.push_str(key);
        self.buf.push_str("\":");
        self.pending_key = true;
        self
    }

    pub fn obj(&mut self) -> &mut Self {
        self.prefix();
        self.buf.push('{');
        self.has_item.push(false);
        self
    }

    pub fn end_obj(&mut self) -> &mut Self {
        self.buf.push('}');
        self.has_item.pop();
        self
    }

    pub fn arr(&mut self) -> &mut Self {
        self.prefix();
        self.buf.push('[');
        self.has_item.push(false);
        self
    }

    pub fn end_arr(&mut self) -> &mut Self {
        self.buf.push(']');
        self.has_item.pop();
        self
    }

    pub fn num(&mut self, x: f64) -> &mut Self {
        self.prefix();
        self.buf.push_str(&f(x));
        self
    }

    pub fn int(&mut self, x: i64) -> &mut Self {
        self.prefix();
        self.buf.push_str(&x.to_string());
        self
    }

    pub fn string(&mut self, v: &str) -> &mut Self {
        self.prefix();
        self.buf.push('"');
        for c in v.chars() {
            match c {
                '"' => self.buf.push_str("\\\""),
                '\\' => self.buf.push_str("\\\\"),
                '\n' => self.buf.push_str("\\n"),
                c if (c as u32) < 0x20 => self.buf.push_str(&format!("\\u{:04x}", c as u32)),
                c => self.buf.push(c),
            }
        }
        self.buf.push('"');
        self
    }

    pub fn bool_or_null(&mut self, v: Option<bool>) -> &mut Self {
        self.prefix();
        self.buf.push_str(match v {
            Some(true) => "true",
            Some(false) => "false",
            None => "null",
        });
        self
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 2.5066282746310002, -1e-300] {
            let s = f(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
        assert_eq!(f(0.0), "0.0e0");
        assert_eq!(f(-0.0), "0.0e0");
    }

    #[test]
    fn json_object_shape() {
        let mut j = Json::new();
        j.obj();
        j.key("n").int(3).key("x").num(1.5);
        j.key("ys").arr().num(1.0).num(2.0).end_arr();
        j.key("ok").bool_or_null(None);
        j.key("tag").string("a\"b");
        j.end_obj();
        assert_eq!(
            j.finish(),
            r#"{"n":3,"x":1.5000000000000000e0,"ys":[1.0000000000000000e0,2.0000000000000000e0],"ok":null,"tag":"a\"b"}"#
        );
    }
}
