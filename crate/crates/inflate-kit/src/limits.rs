/// Size bounds for the operations whose cost is exponential (open-set
/// enumeration) or polynomial but large (chain complexes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest poset for which open sets may be enumerated. Open-set counts
    /// grow like 2^n, so this is a hard gate, not a performance hint.
    pub max_open_elements: usize,
    /// Largest number of faces a chain complex may have before homology
    /// refuses to run.
    pub max_faces: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_open_elements: 20,
            max_faces: 50_000,
        }
    }
}

impl Limits {
    pub fn unlimited() -> Self {
        Limits {
            max_open_elements: usize::MAX,
            max_faces: usize::MAX,
        }
    }
}
