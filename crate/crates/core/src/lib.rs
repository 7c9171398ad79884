pub mod circle_map;
pub mod cli;
pub mod forcing;
pub mod numeric;
pub mod perturb;
pub mod pinch;
pub mod pl;
pub mod tongue_scan;
