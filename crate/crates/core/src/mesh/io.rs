//! OFF, OBJ and PLY readers and writers.
//!
//! Polygonal faces are fan-triangulated on load. Writers emit ASCII with 17
//! significant digits so that coordinates survive a round trip bit-exactly.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use nalgebra::Point3;

use super::SurfaceMesh;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(Self::Off),
            "obj" => Some(Self::Obj),
            "ply" => Some(Self::Ply),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub input_faces: usize,
    /// Number of input polygons with more than three corners.
    pub fan_triangulated: usize,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

struct Polygons {
    positions: Vec<Point3<f64>>,
    polygons: Vec<Vec<u32>>,
}

impl Polygons {
    fn into_mesh(self) -> Result<(SurfaceMesh, LoadReport)> {
        let mut report = LoadReport { input_faces: self.polygons.len(), fan_triangulated: 0 };
        let mut faces = Vec::with_capacity(self.polygons.len());
        for poly in &self.polygons {
            if poly.len() < 3 {
                return Err(Error::Topology(format!("polygon with {} corners", poly.len())));
            }
            if poly.len() > 3 {
                report.fan_triangulated += 1;
            }
            for k in 1..poly.len() - 1 {
                faces.push([poly[0], poly[k], poly[k + 1]]);
            }
        }
        Ok((SurfaceMesh::from_triangles(self.positions, faces)?, report))
    }
}

pub fn load_mesh(reader: impl Read, format: MeshFormat) -> Result<(SurfaceMesh, LoadReport)> {
    let polys = match format {
        MeshFormat::Off => read_off(reader)?,
        MeshFormat::Obj => read_obj(reader)?,
        MeshFormat::Ply => read_ply(reader)?,
    };
    polys.into_mesh()
}

pub fn load_path(path: &Path) -> Result<(SurfaceMesh, LoadReport)> {
    let format = MeshFormat::from_path(path)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown mesh extension: {}", path.display())))?;
    let file = std::fs::File::open(path)?;
    load_mesh(std::io::BufReader::new(file), format)
}

pub fn save_mesh(mesh: &SurfaceMesh, mut writer: impl Write, format: MeshFormat) -> Result<()> {
    let p = mesh.positions();
    let f = mesh.faces();
    match format {
        MeshFormat::Off => {
            writeln!(writer, "OFF")?;
            writeln!(writer, "{} {} 0", p.len(), f.len())?;
            for v in p {
                writeln!(writer, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z)?;
            }
            for t in f {
                writeln!(writer, "3 {} {} {}", t[0], t[1], t[2])?;
            }
        }
        MeshFormat::Obj => {
            for v in p {
                writeln!(writer, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z)?;
            }
            for t in f {
                writeln!(writer, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
            }
        }
        MeshFormat::Ply => {
            writeln!(writer, "ply\nformat ascii 1.0")?;
            writeln!(writer, "element vertex {}", p.len())?;
            writeln!(writer, "property double x\nproperty double y\nproperty double z")?;
            writeln!(writer, "element face {}", f.len())?;
            writeln!(writer, "property list uchar int vertex_indices\nend_header")?;
            for v in p {
                writeln!(writer, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z)?;
            }
            for t in f {
                writeln!(writer, "3 {} {} {}", t[0], t[1], t[2])?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn save_path(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    let format = MeshFormat::from_path(path)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown mesh extension: {}", path.display())))?;
    let file = std::fs::File::create(path)?;
    save_mesh(mesh, std::io::BufWriter::new(file), format)
}

/// Whitespace token stream that skips `#` comments and tracks line numbers.
struct Tokens {
    items: Vec<(usize, String)>,
    pos: usize,
}

impl Tokens {
    fn new(text: &str) -> Self {
        let mut items = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            items.extend(line.split_whitespace().map(|t| (i + 1, t.to_string())));
        }
        Self { items, pos: 0 }
    }

    fn next(&mut self) -> Result<(usize, &str)> {
        let line = self.items.last().map_or(1, |t| t.0);
        let item = self.items.get(self.pos).ok_or_else(|| parse_err(line, "unexpected end of file"))?;
        self.pos += 1;
        Ok((item.0, item.1.as_str()))
    }

    fn parse<T: std::str::FromStr>(&mut self) -> Result<T> {
        let (line, tok) = self.next()?;
        tok.parse().map_err(|_| parse_err(line, format!("cannot parse '{tok}'")))
    }
}

fn read_off(mut reader: impl Read) -> Result<Polygons> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut tok = Tokens::new(&text);
    let (line, head) = tok.next()?;
    if head != "OFF" {
        return Err(parse_err(line, "missing OFF header"));
    }
    let nv: usize = tok.parse()?;
    let nf: usize = tok.parse()?;
    let _ne: usize = tok.parse()?;
    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        positions.push(Point3::new(tok.parse()?, tok.parse()?, tok.parse()?));
    }
    let mut polygons = Vec::with_capacity(nf);
    for _ in 0..nf {
        let n: usize = tok.parse()?;
        let mut poly = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, t) = tok.next()?;
            let v: u32 = t.parse().map_err(|_| parse_err(line, format!("bad index '{t}'")))?;
            if v as usize >= nv {
                return Err(parse_err(line, format!("vertex index {v} out of range")));
            }
            poly.push(v);
        }
        polygons.push(poly);
    }
    Ok(Polygons { positions, polygons })
}

fn read_obj(reader: impl Read) -> Result<Polygons> {
    let mut positions = Vec::new();
    let mut polygons = Vec::new();
    for (i, line) in std::io::BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for x in &mut c {
                    let t = it.next().ok_or_else(|| parse_err(lineno, "short vertex record"))?;
                    *x = t.parse().map_err(|_| parse_err(lineno, format!("cannot parse '{t}'")))?;
                }
                positions.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut poly = Vec::new();
                for t in it {
                    let idx = t.split('/').next().unwrap_or("");
                    let k: i64 = idx.parse().map_err(|_| parse_err(lineno, format!("bad index '{t}'")))?;
                    let v = if k < 0 { positions.len() as i64 + k } else { k - 1 };
                    if v < 0 || v as usize >= positions.len() {
                        return Err(parse_err(lineno, format!("vertex index {k} out of range")));
                    }
                    poly.push(v as u32);
                }
                polygons.push(poly);
            }
            _ => {}
        }
    }
    Ok(Polygons { positions, polygons })
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }

    fn read(self, bytes: &[u8], big: bool) -> f64 {
        macro_rules! rd {
            ($t:ty) => {{
                let arr = bytes[..std::mem::size_of::<$t>()].try_into().unwrap();
                (if big { <$t>::from_be_bytes(arr) } else { <$t>::from_le_bytes(arr) }) as f64
            }};
        }
        match self {
            Self::I8 => bytes[0] as i8 as f64,
            Self::U8 => bytes[0] as f64,
            Self::I16 => rd!(i16),
            Self::U16 => rd!(u16),
            Self::I32 => rd!(i32),
            Self::U32 => rd!(u32),
            Self::F32 => rd!(f32),
            Self::F64 => rd!(f64),
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar(String, Scalar),
    List(String, Scalar, Scalar),
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

fn read_ply(mut reader: impl Read) -> Result<Polygons> {
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    // header is ASCII up to and including "end_header\n"
    let marker = b"end_header";
    let hend =
        data.windows(marker.len()).position(|w| w == marker).ok_or_else(|| parse_err(1, "missing end_header"))?;
    let mut body = hend + marker.len();
    while body < data.len() && data[body] != b'\n' {
        body += 1;
    }
    body += 1;
    let header = String::from_utf8_lossy(&data[..hend]).to_string();
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    for (i, line) in header.lines().enumerate() {
        let lineno = i + 1;
        let w: Vec<&str> = line.split_whitespace().collect();
        match w.first().copied() {
            Some("ply") | Some("comment") | Some("obj_info") | None => {}
            Some("format") => format = w.get(1).map(|s| s.to_string()),
            Some("element") => {
                if w.len() < 3 {
                    return Err(parse_err(lineno, "bad element line"));
                }
                let count = w[2].parse().map_err(|_| parse_err(lineno, "bad element count"))?;
                elements.push(Element { name: w[1].to_string(), count, props: Vec::new() });
            }
            Some("property") => {
                let el = elements.last_mut().ok_or_else(|| parse_err(lineno, "property before element"))?;
                let bad = || parse_err(lineno, "bad property line");
                if w.get(1) == Some(&"list") {
                    if w.len() < 5 {
                        return Err(bad());
                    }
                    let c = Scalar::parse(w[2]).ok_or_else(bad)?;
                    let t = Scalar::parse(w[3]).ok_or_else(bad)?;
                    el.props.push(Property::List(w[4].to_string(), c, t));
                } else {
                    if w.len() < 3 {
                        return Err(bad());
                    }
                    let t = Scalar::parse(w[1]).ok_or_else(bad)?;
                    el.props.push(Property::Scalar(w[2].to_string(), t));
                }
            }
            Some(other) => return Err(parse_err(lineno, format!("unknown header keyword '{other}'"))),
        }
    }
    let format = format.ok_or_else(|| parse_err(1, "missing format line"))?;
    let mut positions = Vec::new();
    let mut polygons = Vec::new();

    // one record reader for ascii and binary
    let mut ascii = if format == "ascii" { Some(Tokens::new(&String::from_utf8_lossy(&data[body..]))) } else { None };
    let big = match format.as_str() {
        "ascii" => false,
        "binary_little_endian" => false,
        "binary_big_endian" => true,
        f => return Err(parse_err(1, format!("unsupported PLY format '{f}'"))),
    };
    let mut cursor = body;
    let mut read_value = |ty: Scalar, ascii: &mut Option<Tokens>| -> Result<f64> {
        if let Some(tok) = ascii {
            tok.parse::<f64>()
        } else {
            if cursor + ty.size() > data.len() {
                return Err(parse_err(0, "truncated binary PLY body"));
            }
            let v = ty.read(&data[cursor..], big);
            cursor += ty.size();
            Ok(v)
        }
    };
    for el in &elements {
        for _ in 0..el.count {
            let mut xyz = [0.0; 3];
            let mut poly = None;
            for prop in &el.props {
                match prop {
                    Property::Scalar(name, ty) => {
                        let v = read_value(*ty, &mut ascii)?;
                        match name.as_str() {
                            "x" => xyz[0] = v,
                            "y" => xyz[1] = v,
                            "z" => xyz[2] = v,
                            _ => {}
                        }
                    }
                    Property::List(name, cty, ty) => {
                        let n = read_value(*cty, &mut ascii)? as usize;
                        let mut items = Vec::with_capacity(n);
                        for _ in 0..n {
                            items.push(read_value(*ty, &mut ascii)? as u32);
                        }
                        if name == "vertex_indices" || name == "vertex_index" {
                            poly = Some(items);
                        }
                    }
                }
            }
            match el.name.as_str() {
                "vertex" => positions.push(Point3::new(xyz[0], xyz[1], xyz[2])),
                "face" => polygons.push(poly.ok_or_else(|| parse_err(0, "face without vertex_indices"))?),
                _ => {}
            }
        }
    }
    if polygons.iter().flatten().any(|&v| v as usize >= positions.len()) {
        return Err(parse_err(0, "vertex index out of range"));
    }
    Ok(Polygons { positions, polygons })
}

/// Reads an oriented point file: `x y z nx ny nz` per line.
pub fn load_oriented_points(reader: impl Read) -> Result<Vec<(Point3<f64>, nalgebra::Vector3<f64>)>> {
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(i + 1, format!("cannot parse '{t}'"))))
            .collect::<Result<_>>()?;
        if vals.len() != 6 {
            return Err(parse_err(i + 1, format!("expected 6 values, found {}", vals.len())));
        }
        out.push((Point3::new(vals[0], vals[1], vals[2]), nalgebra::Vector3::new(vals[3], vals[4], vals[5])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    fn roundtrip(m: &SurfaceMesh, fmt: MeshFormat) -> SurfaceMesh {
        let mut buf = Vec::new();
        save_mesh(m, &mut buf, fmt).unwrap();
        load_mesh(&buf[..], fmt).unwrap().0
    }

    #[test]
    fn tetrahedron_from_off_text() {
        let text = "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";
        let (m, report) = load_mesh(text.as_bytes(), MeshFormat::Off).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces()), (4, 6, 4));
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(report.fan_triangulated, 0);
    }

    #[test]
    fn quad_cube_is_fan_split() {
        let text = "OFF\n8 6 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n\
                    4 0 2 3 1\n4 4 5 7 6\n4 0 1 5 4\n4 2 6 7 3\n4 0 4 6 2\n4 1 3 7 5\n";
        let (m, report) = load_mesh(text.as_bytes(), MeshFormat::Off).unwrap();
        assert_eq!(m.num_vertices(), 8);
        assert_eq!(m.num_faces(), 12);
        assert_eq!(report.fan_triangulated, 6);
        assert!(m.is_closed());
        assert!((m.signed_volume().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triple_edge_file_is_topology_error() {
        let text = "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
        assert!(matches!(load_mesh(text.as_bytes(), MeshFormat::Off), Err(Error::Topology(_))));
    }

    #[test]
    fn malformed_is_parse_error() {
        let text = "OFF\n4 1 0\n0 0 0\n1 0 x\n";
        assert!(matches!(load_mesh(text.as_bytes(), MeshFormat::Off), Err(Error::Parse { .. })));
    }

    #[test]
    fn roundtrip_all_formats_bit_exact() {
        let m = shapes::icosphere(2, 1.234567).merged(&shapes::torus(0.7, 0.1, 9, 5));
        for fmt in [MeshFormat::Off, MeshFormat::Obj, MeshFormat::Ply] {
            let back = roundtrip(&m, fmt);
            assert_eq!(back, m, "{fmt:?}");
            assert_eq!(back.num_components(), 2);
        }
    }

    #[test]
    fn empty_mesh_roundtrip() {
        let m = SurfaceMesh::new();
        let mut buf = Vec::new();
        save_mesh(&m, &mut buf, MeshFormat::Off).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("OFF\n0 0 0"));
        assert!(load_mesh(&buf[..], MeshFormat::Off).unwrap().0.is_empty());
    }

    #[test]
    fn binary_ply() {
        let mut buf = Vec::new();
        buf.extend_from_slice(
            b"ply\nformat binary_little_endian 1.0\nelement vertex 3\nproperty float x\n\
              property float y\nproperty float z\nelement face 1\n\
              property list uchar int vertex_indices\nend_header\n",
        );
        for v in [[0f32, 0., 0.], [1., 0., 0.], [0., 1., 0.]] {
            for c in v {
                buf.extend_from_slice(&c.to_le_bytes());
            }
        }
        buf.push(3);
        for i in [0i32, 1, 2] {
            buf.extend_from_slice(&i.to_le_bytes());
        }
        let (m, _) = load_mesh(&buf[..], MeshFormat::Ply).unwrap();
        assert_eq!(m.num_faces(), 1);
        assert_eq!(m.position(1), Point3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn obj_negative_indices_and_slashes() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3/1 -2/2 -1/3\n";
        let (m, _) = load_mesh(text.as_bytes(), MeshFormat::Obj).unwrap();
        assert_eq!(m.face(0), [0, 1, 2]);
    }
}
