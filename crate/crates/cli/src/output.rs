//! Text artifacts: coarse mesh, fine-to-coarse map, Matrix Market
//! prolongations and the face colouring used for visualization.

use std::fmt::Write;

use ice_core::mapping::{Prolongation, Tracker, VectorProlongation};
use ice_core::{Face, Surface};

use crate::obj::ParseError;

/// Live faces in ascending id order and each face's position in that list.
pub fn face_index(surface: &Surface) -> (Vec<Face>, Vec<u32>) {
    let m = surface.mesh();
    let faces: Vec<Face> = m.faces().collect();
    let mut index = vec![u32::MAX; m.face_capacity()];
    for (k, f) in faces.iter().enumerate() {
        index[f.idx()] = k as u32;
    }
    (faces, index)
}

/// Header `V E F`, then one line per face: three vertex ids followed by
/// the lengths of the face's halfedges in cycle order.
pub fn write_coarse(surface: &Surface) -> String {
    let m = surface.mesh();
    let mut s = format!("{} {} {}\n", m.num_vertices(), m.num_edges(), m.num_faces());
    for f in face_index(surface).0 {
        let [a, b, c] = m.face_vertices(f);
        let [l0, l1, l2] = surface.face_lengths(f);
        writeln!(s, "{} {} {} {:.16e} {:.16e} {:.16e}", a.0, b.0, c.0, l0, l1, l2).unwrap();
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoarseFile {
    pub vertices: usize,
    pub edges: usize,
    pub faces: Vec<([usize; 3], [f64; 3])>,
}

pub fn read_coarse(text: &str) -> Result<CoarseFile, ParseError> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize| ParseError::Syntax { line, msg: "malformed record".into() };
    let (_, head) = lines.next().ok_or(ParseError::Empty)?;
    let h: Vec<usize> = head.split_whitespace().map(|t| t.parse()).collect::<Result<_, _>>().map_err(|_| bad(1))?;
    if h.len() != 3 {
        return Err(bad(1));
    }
    let mut faces = Vec::with_capacity(h[2]);
    for (k, l) in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 6 {
            return Err(bad(k + 1));
        }
        let mut v = [0usize; 3];
        let mut len = [0f64; 3];
        for c in 0..3 {
            v[c] = t[c].parse().map_err(|_| bad(k + 1))?;
            len[c] = t[3 + c].parse().map_err(|_| bad(k + 1))?;
        }
        faces.push((v, len));
    }
    if faces.len() != h[2] {
        return Err(bad(h[2] + 1));
    }
    Ok(CoarseFile { vertices: h[0], edges: h[1], faces })
}

/// `fineId coarseFaceId b0 b1 b2` per tracked fine vertex.
pub fn write_map(surface: &Surface, tracker: &Tracker) -> String {
    let (_, index) = face_index(surface);
    let mut s = String::new();
    for (i, p) in tracker.points().iter().enumerate() {
        let [b0, b1, b2] = p.bary;
        writeln!(s, "{} {} {:.16e} {:.16e} {:.16e}", i, index[p.face.idx()], b0, b1, b2).unwrap();
    }
    s
}

fn column_comment(surface: &Surface) -> String {
    let ids: Vec<String> = surface.mesh().vertices().map(|v| v.0.to_string()).collect();
    format!("% rows: fine vertices; columns: coarse vertices {}\n", ids.join(" "))
}

pub fn write_pmat(surface: &Surface, p: &Prolongation) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
    s.push_str(&column_comment(surface));
    writeln!(s, "{} {} {}", p.rows, p.cols, p.entries.len()).unwrap();
    for &(i, j, x) in &p.entries {
        writeln!(s, "{} {} {:.16e}", i + 1, j + 1, x).unwrap();
    }
    s
}

pub fn write_vector_pmat(surface: &Surface, p: &VectorProlongation) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate complex general\n");
    s.push_str(&column_comment(surface));
    writeln!(s, "{} {} {}", p.rows, p.cols, p.entries.len()).unwrap();
    for &(i, j, z) in &p.entries {
        writeln!(s, "{} {} {:.16e} {:.16e}", i + 1, j + 1, z.re, z.im).unwrap();
    }
    s
}

/// Greedy colouring of faces in id order; faces sharing an edge differ.
pub fn greedy_face_colors(surface: &Surface) -> Vec<u32> {
    let m = surface.mesh();
    let (faces, index) = face_index(surface);
    let mut color = vec![u32::MAX; faces.len()];
    let mut used = Vec::new();
    for (k, &f) in faces.iter().enumerate() {
        used.clear();
        for h in m.face_halfedges(f) {
            if let Some(g) = m.face(m.twin(h)) {
                let c = color[index[g.idx()] as usize];
                if c != u32::MAX {
                    used.push(c);
                }
            }
        }
        color[k] = (0..).find(|c| !used.contains(c)).unwrap();
    }
    color
}

/// Per fine vertex: coarse face, barycentrics and the face's colour.
pub fn write_viz(surface: &Surface, tracker: &Tracker) -> String {
    let (_, index) = face_index(surface);
    let color = greedy_face_colors(surface);
    let mut s = String::new();
    for (i, p) in tracker.points().iter().enumerate() {
        let k = index[p.face.idx()] as usize;
        let [b0, b1, b2] = p.bary;
        writeln!(s, "{} {} {:.16e} {:.16e} {:.16e} {}", i, k, b0, b1, b2, color[k]).unwrap();
    }
    s
}
