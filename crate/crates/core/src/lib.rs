pub mod linalg;
pub mod objects;
pub mod sdp;
pub mod robustness;
pub mod structure;
pub mod random;
pub mod reference;
pub mod json;
pub mod theorems;
