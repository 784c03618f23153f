use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "superhopf",
    version,
    about = "Witt vectors, Dieudonne modules, super Hopf algebras, Ext and Steenrod operations over finite fields"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Group,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit a JSON document with a run manifest.
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    /// Emit a human-readable table (the default).
    #[arg(long, global = true)]
    pub table: bool,
    /// Write the output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Characteristic, unless the algebra descriptor carries `p=`.
    #[arg(long, global = true, default_value_t = 3)]
    pub p: u32,
    /// Field degree over F_p, unless the algebra descriptor carries `e=`.
    #[arg(long, global = true, default_value_t = 1)]
    pub e: u32,
    /// Largest homological degree.
    #[arg(long, global = true, default_value_t = 4)]
    pub smax: usize,
    /// Cohomological degree bound for saturation (default 2p^2).
    #[arg(long, global = true)]
    pub bound: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum Group {
    /// Witt vector arithmetic and structure polynomials.
    #[command(subcommand)]
    Witt(WittCmd),
    /// Cyclic Dieudonne modules and their classification.
    #[command(subcommand)]
    Dieudonne(DieudonneCmd),
    /// Catalog super Hopf algebras.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Ext(k,k) via minimal resolutions.
    #[command(subcommand)]
    Ext(ExtCmd),
    /// Projectivity of modules and detection along embeddings.
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Steenrod operations on presented cohomology rings.
    #[command(subcommand)]
    Steenrod(SteenrodCmd),
    /// Regenerate the committed fixtures and diff them.
    #[command(subcommand)]
    Repro(ReproCmd),
}

#[derive(Subcommand, Debug)]
pub enum WittCmd {
    /// Structure polynomials S_i, P_i, N_i for i <= n.
    Poly {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Evaluate an operation on Witt vectors given as arrays of element codes.
    Eval {
        #[arg(long, value_enum)]
        op: WittOp,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: Option<String>,
        /// Multiplier for `times`.
        #[arg(long, default_value_t = 1)]
        k: u64,
    },
    /// Randomized check of FV = VF = p, V(x^σ u) = x V(u) and F(xu) = x^σ F(u).
    Laws {
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive additive structure of W_m(F_q).
    Cyclic {
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WittOp {
    Add,
    Sub,
    Mul,
    Neg,
    V,
    F,
    Sigma,
    Times,
    Order,
}

#[derive(Subcommand, Debug)]
pub enum DieudonneCmd {
    /// Labels of all cyclic quotients of M(m,n), with multiplicities.
    Classify {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Compare two labels by the normal-form test and by brute force.
    Iso {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum AlgebraCmd {
    /// Presentation and coproduct of a catalog algebra.
    Build {
        #[arg(long)]
        algebra: String,
    },
    /// Verify the Hopf axioms on the monomial basis.
    HopfCheck {
        #[arg(long)]
        algebra: String,
    },
    /// Fold the Z-graded lift of E(m,n) and compare with the catalog E-(m,n).
    Fold {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        a: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExtCmd {
    /// Dimensions of Ext^s(k,k) split by parity.
    Dims {
        #[arg(long)]
        algebra: String,
    },
    /// The named classes lambda, zeta, y, x in resolution coordinates.
    Classes {
        #[arg(long)]
        algebra: String,
    },
    /// Yoneda product of two classes (dictionary names or g<s>_<j>).
    Product {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Least n with class^n = 0.
    Power {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Inflation along E-(m,n) -> E-(m-1,n).
    Inflate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    Regular,
    Trivial,
    Syzygy,
}

#[derive(Subcommand, Debug)]
pub enum ModuleCmd {
    /// Projectivity of a standard module, optionally restricted or extended.
    Projective {
        #[arg(long)]
        algebra: String,
        #[arg(long, value_enum, default_value = "regular")]
        kind: ModuleKind,
        /// Restrict along W-(m-1) -> E-(m,1).
        #[arg(long, value_name = "M")]
        restrict_w_minus: Option<usize>,
        /// Extend scalars to F_{p^E}.
        #[arg(long, value_name = "E")]
        extend: Option<u32>,
    },
    /// Restrict a module along each listed embedding and test projectivity.
    Detect {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, value_name = "E")]
        extend: Option<u32>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Koszul,
    Printed,
}

#[derive(Subcommand, Debug)]
pub enum SteenrodCmd {
    /// Apply P^i or βP^i to an element.
    Apply {
        #[arg(long)]
        ring: String,
        /// P or betaP.
        #[arg(long)]
        op: String,
        /// Index: an integer or a half-integer such as 1/2.
        #[arg(long)]
        i: String,
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value = "koszul")]
        convention: Convention,
    },
    /// Smallest ideal containing the seeds and closed under the operations.
    Saturate {
        #[arg(long)]
        ring: String,
        #[arg(long, required = true)]
        seed: Vec<String>,
        #[arg(long, value_enum, default_value = "koszul")]
        convention: Convention,
    },
    /// Decide which alternative of the degree-2 dichotomy a saturated ideal satisfies.
    ClassifyB36 {
        #[arg(long)]
        ring: String,
        #[arg(long, required = true)]
        seed: Vec<String>,
        #[arg(long, value_enum, default_value = "koszul")]
        convention: Convention,
    },
    /// Search for a product of Bocksteins in the saturation of a seed in H^*((Z/p)^s).
    Serre {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        seed: String,
        #[arg(long, value_enum, default_value = "koszul")]
        convention: Convention,
    },
    /// Operations on every generator, in the column order P^0, βP^0, P^1/2, βP^1/2, P^1, P^2, βP^1.
    Table {
        #[arg(long)]
        ring: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReproCmd {
    /// Regenerate every fixture and compare with the committed files.
    All {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
        /// Overwrite the committed files instead of comparing.
        #[arg(long)]
        write: bool,
        /// Restrict to the named fixtures.
        #[arg(long)]
        only: Vec<String>,
    },
}
