//! Register-level model of the sectioning macros, written from their bodies:
//! `\newsection`, `\subsection`, `\Appendix`, `\Supplement`,
//! `\NotocSection`, `\proclaim` and `\neqn`.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ev {
    Section,
    Subsection,
    Appendix,
    Supplement,
    Notoc,
    Proclaim,
    Equation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Label(String),
    /// Rejected; the registers are left alone.
    Rejected,
    /// First appendix after a numbered section: label plus divider.
    DividedLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regs {
    pub secno: i64,
    pub subsecno: i64,
    pub proclno: i64,
    pub eqnumber: i64,
}

impl Regs {
    pub fn new(subsections: bool) -> Self {
        Regs {
            secno: 0,
            subsecno: if subsections { 0 } else { -1 },
            proclno: 0,
            eqnumber: 0,
        }
    }

    pub fn step(&mut self, ev: Ev) -> Outcome {
        match ev {
            Ev::Section => {
                self.secno += 1;
                if -1 < self.subsecno {
                    self.subsecno = 0;
                }
                self.proclno = 0;
                Outcome::Label(self.secno.to_string())
            }
            Ev::Subsection => {
                if self.subsecno < 0 || self.secno < 1 {
                    return Outcome::Rejected;
                }
                self.subsecno += 1;
                self.proclno = 0;
                Outcome::Label(format!("{}.{}", self.secno, self.subsecno))
            }
            Ev::Appendix => {
                let divided = self.secno > 0;
                let secno = if divided { 0 } else { self.secno } - 1;
                let letters = "ABCDEFGHIJ";
                let Some(letter) = letters.chars().nth((-secno - 1) as usize) else {
                    return Outcome::Rejected;
                };
                self.secno = secno;
                self.subsecno = 0;
                self.proclno = 0;
                if divided {
                    Outcome::DividedLabel(letter.to_string())
                } else {
                    Outcome::Label(letter.to_string())
                }
            }
            Ev::Supplement => {
                if self.secno < 0 {
                    self.secno = 1000;
                } else {
                    self.secno += 1;
                }
                Outcome::Label(String::new())
            }
            Ev::Notoc => {
                self.secno = 0;
                Outcome::Label(String::new())
            }
            Ev::Proclaim => {
                self.proclno += 1;
                let mut s = self.secno.to_string();
                if -1 < self.subsecno {
                    s.push('.');
                    s.push_str(&self.subsecno.to_string());
                }
                s.push('.');
                s.push_str(&self.proclno.to_string());
                Outcome::Label(s)
            }
            Ev::Equation => {
                self.eqnumber += 1;
                Outcome::Label(format!("({})", self.eqnumber))
            }
        }
    }
}
