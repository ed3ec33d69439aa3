use serde::Serialize;

/// Colour of a plaquette, an edge or a layer.
pub type Colour = u8;

pub const COLOUR_NAMES: [&str; 3] = ["green", "red", "blue"];

/// A hexagonal plaquette. Plaquettes sit on the sites of a triangular lattice.
#[derive(Clone, Debug, Serialize)]
pub struct Plaquette {
    pub cell: (usize, usize),
    pub colour: Colour,
    /// The six boundary edges.
    pub boundary: Vec<usize>,
}

/// A honeycomb vertex, i.e. one emitter chain: an up or down triangle of the triangular lattice.
#[derive(Clone, Debug, Serialize)]
pub struct HexVertex {
    pub cell: (usize, usize),
    /// Position 0..6 inside the unit cell.
    pub chain: usize,
    /// Incident edge of each colour.
    pub edges: [usize; 3],
}

/// A honeycomb edge between two vertices, separating the plaquettes `sides`.
#[derive(Clone, Debug, Serialize)]
pub struct HexEdge {
    pub ends: [usize; 2],
    pub colour: Colour,
    pub sides: [usize; 2],
    /// Torus winding of `sides[1]` relative to `sides[0]`, in cell units.
    pub wrap: [i8; 2],
}

/// Three-colourable honeycomb on an `L × L` torus of six-vertex unit cells.
///
/// Plaquette sites are `(a, b)` on the triangular lattice with colour `(a − b) mod 3`.
/// A unit cell spans the vectors `u₁ = (1, 1)` and `u₂ = (−1, 2)` and holds one
/// plaquette of each colour; the torus is spanned by `L u₁` and `L u₂`.
#[derive(Clone, Debug, Serialize)]
pub struct Honeycomb {
    l: usize,
    plaquettes: Vec<Plaquette>,
    vertices: Vec<HexVertex>,
    edges: Vec<HexEdge>,
}

impl Honeycomb {
    pub fn new(l: usize) -> Self {
        assert!(l >= 1);
        let mut hc = Honeycomb { l, plaquettes: Vec::with_capacity(3 * l * l), vertices: Vec::with_capacity(6 * l * l), edges: Vec::with_capacity(9 * l * l) };
        for i in 0..l {
            for j in 0..l {
                for s in 0..3 {
                    hc.plaquettes.push(Plaquette { cell: (i, j), colour: s as Colour, boundary: Vec::with_capacity(6) });
                    for _ in 0..2 {
                        hc.vertices.push(HexVertex { cell: (i, j), chain: hc.vertices.len() % 6, edges: [usize::MAX; 3] });
                    }
                }
            }
        }
        for i in 0..l as i64 {
            for j in 0..l as i64 {
                for s in 0..3 {
                    let (a, b) = (i - j + s, i + 2 * j);
                    let up = hc.triangle(a, b, false);
                    let links = [(hc.triangle(a, b, true), (a + 1, b), (a, b + 1)), (hc.triangle(a, b - 1, true), (a, b), (a + 1, b)), (hc.triangle(a - 1, b, true), (a, b), (a, b + 1))];
                    for (down, c0, c1) in links {
                        let (p0, w0) = hc.site(c0.0, c0.1);
                        let (p1, w1) = hc.site(c1.0, c1.1);
                        let colour = 3 - hc.plaquettes[p0].colour - hc.plaquettes[p1].colour;
                        let id = hc.edges.len();
                        hc.edges.push(HexEdge { ends: [up, down], colour, sides: [p0, p1], wrap: [(w1.0 - w0.0) as i8, (w1.1 - w0.1) as i8] });
                        for v in [up, down] {
                            assert_eq!(hc.vertices[v].edges[colour as usize], usize::MAX, "vertex {v} has two {colour}-edges");
                            hc.vertices[v].edges[colour as usize] = id;
                        }
                        hc.plaquettes[p0].boundary.push(id);
                        hc.plaquettes[p1].boundary.push(id);
                    }
                }
            }
        }
        hc
    }

    /// Plaquette of triangular site `(a, b)` and the torus winding of the site.
    pub fn site(&self, a: i64, b: i64) -> (usize, (i64, i64)) {
        let l = self.l as i64;
        let s = (a - b).rem_euclid(3);
        let j = (b - a + s) / 3;
        let i = a - s + j;
        let id = ((i.rem_euclid(l) * l + j.rem_euclid(l)) * 3 + s) as usize;
        (id, (i.div_euclid(l), j.div_euclid(l)))
    }

    /// Up triangle `(a,b),(a+1,b),(a,b+1)` or down triangle `(a+1,b),(a,b+1),(a+1,b+1)`.
    fn triangle(&self, a: i64, b: i64, down: bool) -> usize {
        2 * self.site(a, b).0 + down as usize
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn vertices(&self) -> &[HexVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[HexEdge] {
        &self.edges
    }

    /// The plaquette of the given colour on either side of `edge`.
    pub fn side_of_colour(&self, edge: usize, colour: Colour) -> Option<usize> {
        self.edges[edge].sides.into_iter().find(|&p| self.plaquettes[p].colour == colour)
    }

    /// Vertices on the boundary of a plaquette.
    pub fn plaquette_vertices(&self, p: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.plaquettes[p].boundary.iter().flat_map(|&e| self.edges[e].ends).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}
