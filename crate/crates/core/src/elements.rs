//! Element table: masses, covalent and van der Waals radii, default valences.
//!
//! Values live in `data/elements.csv` and are parsed once on first use.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Deserialize;

const ELEMENTS_CSV: &str = include_str!("../data/elements.csv");

#[derive(Debug, Clone, Deserialize)]
struct ElementRow {
    symbol: String,
    number: u8,
    mass: f64,
    covalent: f64,
    vdw: f64,
    valences: String,
}

#[derive(Debug, Clone)]
pub struct ElementData {
    pub symbol: String,
    pub number: u8,
    pub mass: f64,
    pub covalent_radius: f64,
    pub vdw_radius: f64,
    pub valences: Vec<u8>,
}

struct Table {
    by_number: HashMap<u8, ElementData>,
    by_symbol: HashMap<String, u8>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(ELEMENTS_CSV.as_bytes());
        let mut by_number = HashMap::new();
        let mut by_symbol = HashMap::new();
        for row in reader.deserialize::<ElementRow>() {
            let row = row.expect("bundled element table is well formed");
            let valences = row
                .valences
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().expect("valence is an integer"))
                .collect();
            by_symbol.insert(row.symbol.to_ascii_uppercase(), row.number);
            by_number.insert(
                row.number,
                ElementData {
                    symbol: row.symbol,
                    number: row.number,
                    mass: row.mass,
                    covalent_radius: row.covalent,
                    vdw_radius: row.vdw,
                    valences,
                },
            );
        }
        Table {
            by_number,
            by_symbol,
        }
    })
}

/// A chemical element known to the bundled table, keyed by atomic number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(u8);

impl Element {
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const SI: Element = Element(14);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const SE: Element = Element(34);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    /// Case-insensitive symbol lookup ("CL", "cl" and "Cl" all resolve).
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        let key = symbol.trim().to_ascii_uppercase();
        table().by_symbol.get(&key).map(|&n| Element(n))
    }

    pub fn from_number(number: u8) -> Option<Element> {
        table().by_number.contains_key(&number).then_some(Element(number))
    }

    pub fn number(self) -> u8 {
        self.0
    }

    fn data(self) -> &'static ElementData {
        &table().by_number[&self.0]
    }

    pub fn symbol(self) -> &'static str {
        &self.data().symbol
    }

    pub fn mass(self) -> f64 {
        self.data().mass
    }

    pub fn covalent_radius(self) -> f64 {
        self.data().covalent_radius
    }

    pub fn vdw_radius(self) -> f64 {
        self.data().vdw_radius
    }

    /// Allowed neutral valences, ascending. Empty for metals.
    pub fn valences(self) -> &'static [u8] {
        &self.data().valences
    }

    pub fn is_hydrogen(self) -> bool {
        self.0 == 1
    }

    pub fn is_halogen(self) -> bool {
        matches!(self.0, 9 | 17 | 35 | 53)
    }

    /// Valence list shifted for a formal charge.
    ///
    /// Group 15-17 atoms gain a bond per positive charge and lose one per
    /// negative charge. Carbon loses one per unit of either sign, boron
    /// gains one per negative unit.
    pub fn charged_valences(self, charge: i8) -> Vec<u8> {
        let base = self.valences();
        if charge == 0 {
            return base.to_vec();
        }
        let shift: i16 = match self.0 {
            6 | 14 => -(i16::from(charge).abs()),
            5 => -i16::from(charge),
            7 | 15 | 33 | 8 | 16 | 34 | 9 | 17 | 35 | 53 => i16::from(charge),
            _ => 0,
        };
        base.iter()
            .filter_map(|&v| u8::try_from(i16::from(v) + shift).ok())
            .collect()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
