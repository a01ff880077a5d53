//! Paper-folding engine: an exact 32-triangle sheet model, fold rules and
//! enumeration, a layered fold simulator, task generation, file codecs,
//! scoring and exact solvers.

pub mod codecs;
pub mod error;
pub mod mesh;
pub mod oracle;
pub mod rules;
pub mod scoring;
pub mod sim;
pub mod taskgen;

pub use codecs::AnswerDoc;
pub use error::Error;
pub use mesh::{Isometry, Orientation, Point, TriRef, TriSet};
pub use oracle::{Plan, VerifyOutcome};
pub use rules::{Action, ActionSequence, Facing, FoldAxis, FoldSpec, RotationSpec, RuleOptions};
pub use scoring::{Modality, Score, ScoreReport};
pub use sim::{FoldedState, HoleAttribute, HolePattern, HoleSpec, LabelMode, Shape, Size};
pub use taskgen::{Family, GeneratorConfig, GroundTruth, TaskInstance};
