use std::fmt::Write;

/// In-memory CSV table with a leading `#` comment line.
pub struct CsvTable {
    text: String,
    width: usize,
}

/// A CSV field.
pub enum Field<'a> {
    Num(f64),
    Int(i64),
    Text(&'a str),
}

impl CsvTable {
    pub fn new(comment: &str, columns: &[&str]) -> Self {
        let mut text = String::new();
        writeln!(text, "# {comment}").unwrap();
        writeln!(text, "{}", columns.join(",")).unwrap();
        Self {
            text,
            width: columns.len(),
        }
    }

    pub fn row(&mut self, fields: &[Field<'_>]) {
        assert_eq!(fields.len(), self.width, "row width does not match header");
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match f {
                Field::Num(v) => write!(self.text, "{}", format_number(*v)).unwrap(),
                Field::Int(v) => write!(self.text, "{v}").unwrap(),
                Field::Text(s) => self.text.push_str(s),
            }
        }
        self.text.push('\n');
    }

    pub fn nums(&mut self, values: &[f64]) {
        let fields: Vec<Field<'_>> = values.iter().map(|&v| Field::Num(v)).collect();
        self.row(&fields);
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// 17 significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}
