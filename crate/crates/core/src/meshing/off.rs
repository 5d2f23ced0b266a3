use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::mesh::TriMesh;

/// ASCII OFF representation of the embedded mesh.
pub fn to_off(mesh: &TriMesh) -> String {
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(s, "{} {} 0", mesh.vertex_count(), mesh.triangle_count()).unwrap();
    for p in &mesh.points {
        writeln!(s, "{:.17e} {:.17e} {:.17e}", p[0], p[1], p[2]).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    s
}

pub fn write_off(mesh: &TriMesh, path: &Path) -> io::Result<()> {
    std::fs::write(path, to_off(mesh))
}
