//! Free-group and graph algorithms for studying extension properties of
//! hypertournaments.
//!
//! The crate covers Stallings graphs of finitely generated subgroups of free
//! groups, fiber products over graphs, mod-p homology of cyclic covers,
//! separation of elements from subgroups in finite quotients, and the
//! extension of partial automorphisms of finite hypertournaments.

pub mod arith;
pub mod covers;
pub mod eppa;
pub mod fiber;
pub mod gen;
pub mod graph;
pub mod homology;
pub mod hypertournament;
pub mod linalg;
pub mod oracle;
pub mod perm;
pub mod ring;
pub mod separability;
pub mod stallings;
pub mod uf;
pub mod verification;
pub mod word;

pub use graph::{Edge, GraphError, GraphMorphism, LabeledGraph};
pub use stallings::{fold, subgroup_graph, SubgroupGraph};
pub use word::{maximal_root, Letter, Word};
