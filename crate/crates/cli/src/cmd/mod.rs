pub mod analyze;
pub mod replay;
pub mod run;
pub mod traj;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// A file, or stdout when no path is given.
pub(crate) fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
