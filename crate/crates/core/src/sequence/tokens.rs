//! Value grammar shared by sequence files and configuration files.
//!
//! Reals accept arithmetic over literals and `pi` (`-pi/2`, `3*pi/4`, `2pi`).
//! Complex values accept `a`, `bi`, `a+bi`, `a-bi` and polar `r@angle`.

use num_complex::Complex64 as C64;

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    v += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d == 0.0 {
                        return Err("division by zero".into());
                    }
                    v /= d;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err("expected ')'".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'p') => {
                if self.s[self.pos..].starts_with(b"pi") {
                    self.pos += 2;
                    Ok(std::f64::consts::PI)
                } else {
                    Err("expected a number or 'pi'".into())
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    let exp_sign =
                        (c == b'-' || c == b'+') && matches!(self.s[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                let v: f64 = text
                    .parse()
                    .map_err(|_| format!("malformed number '{text}'"))?;
                if self.s[self.pos..].starts_with(b"pi") {
                    self.pos += 2;
                    return Ok(v * std::f64::consts::PI);
                }
                Ok(v)
            }
            _ => Err("expected a number or 'pi'".into()),
        }
    }
}

/// Real expression; error messages name the expected token.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let mut c = Cursor {
        s: text.as_bytes(),
        pos: 0,
    };
    let v = c.expr()?;
    c.skip_ws();
    if c.pos != text.len() {
        return Err(format!("unexpected '{}' in '{text}'", &text[c.pos..]));
    }
    if !v.is_finite() {
        return Err(format!("'{text}' is not finite"));
    }
    Ok(v)
}

pub fn parse_nonneg(text: &str) -> Result<f64, String> {
    let v = parse_real(text)?;
    if v < 0.0 {
        return Err(format!("expected a non-negative value, got {v}"));
    }
    Ok(v)
}

pub fn parse_uint(text: &str) -> Result<usize, String> {
    text.trim()
        .parse()
        .map_err(|_| format!("expected a non-negative integer, got '{text}'"))
}

/// Complex literal: `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` or `r@angle`.
pub fn parse_complex(text: &str) -> Result<C64, String> {
    let t = text.trim();
    if let Some((r, a)) = t.split_once('@') {
        return Ok(C64::from_polar(parse_real(r)?, parse_real(a)?));
    }
    // split at a top-level sign that is not a leading sign or exponent sign
    let bytes = t.as_bytes();
    let mut split = None;
    let mut depth = 0i32;
    for i in 1..bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-'
                if depth == 0 && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'/' | b'(') =>
            {
                split = Some(i)
            }
            _ => {}
        }
    }
    let part = |p: &str| -> Result<C64, String> {
        let p = p.trim();
        match p.strip_suffix('i') {
            Some(coef) => {
                let c = coef.trim();
                let v = match c {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    _ => parse_real(c.strip_suffix('*').unwrap_or(c))?,
                };
                Ok(C64::new(0.0, v))
            }
            None => Ok(C64::new(parse_real(p)?, 0.0)),
        }
    };
    match split {
        Some(i) => Ok(part(&t[..i])? + part(&t[i..])?),
        None => part(t),
    }
}

/// `x` → 0, `y` → π/2, otherwise an angle expression.
pub fn parse_axis_angle(text: &str) -> Result<f64, String> {
    match text.trim() {
        "x" => Ok(0.0),
        "y" => Ok(std::f64::consts::FRAC_PI_2),
        other => parse_real(other).map_err(|e| format!("expected 'x', 'y' or an angle: {e}")),
    }
}
