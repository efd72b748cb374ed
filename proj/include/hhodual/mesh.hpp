#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace hhodual {

using Point = Eigen::Vector2d;

enum class FaceLabel { Interior, Dirichlet, Neumann };

struct Face
{
    std::array<int, 2> vertices;   // ordered counterclockwise with respect to cell_plus
    Point normal;                  // unit, outward for cell_plus
    int cell_plus = -1;
    int cell_minus = -1;           // -1 on the boundary
    FaceLabel label = FaceLabel::Interior;
    double length = 0.0;

    bool is_boundary() const { return cell_minus < 0; }
};

class MeshError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using EdgeKey = std::pair<int, int>;

inline EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

/// Conforming triangulation of a 2D polygonal domain.
///
/// Cells are stored counterclockwise. Local edge i joins vertices (i+1)%3 and
/// (i+2)%3, i.e. it is opposite to local vertex i. Local edge 0 is always the
/// newest-vertex-bisection refinement edge, so vertex 0 is the "newest" vertex.
///
/// A face normal points out of cell_plus, which is the lower-indexed adjacent
/// cell at construction time.
class Mesh
{
public:
    Mesh() = default;

    /// Builds a mesh from raw triangles. Orientation is fixed to counterclockwise
    /// and each triangle is rotated so that its longest edge becomes the
    /// refinement edge. Boundary edges missing from `labels` become Dirichlet.
    static Mesh from_triangles(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
                               const std::map<EdgeKey, FaceLabel>& labels = {});

    /// Builds a mesh keeping the given vertex order (must be counterclockwise).
    static Mesh from_ordered(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
                             const std::map<EdgeKey, FaceLabel>& labels, std::vector<int> parent = {});

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }

    const Point& vertex(int i) const { return vertices_[i]; }
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::array<int, 3>& cell(int c) const { return cells_[c]; }
    const std::vector<std::array<int, 3>>& cells() const { return cells_; }
    const Face& face(int f) const { return faces_[f]; }
    const std::vector<Face>& faces() const { return faces_; }

    /// Face index of local edge i of cell c.
    int cell_face(int c, int i) const { return cell_faces_[c][i]; }
    /// nu_S . nu_K for local edge i of cell c (+1 if c is cell_plus of the face).
    int cell_face_sign(int c, int i) const { return cell_face_signs_[c][i]; }
    /// Local index of the refinement edge of cell c (always 0 by convention).
    int refinement_edge(int) const { return 0; }

    double area(int c) const { return areas_[c]; }
    double diameter(int c) const { return diameters_[c]; }
    const Point& centroid(int c) const { return centroids_[c]; }
    double face_diameter(int f) const { return faces_[f].length; }
    double h_max() const;
    double total_area() const;
    double min_angle() const;

    /// Index of the parent cell in the mesh this one was refined from (-1 if none).
    int parent(int c) const { return parent_.empty() ? -1 : parent_[c]; }

    std::map<EdgeKey, FaceLabel> boundary_labels() const;

    /// Throws MeshError describing the first violated invariant.
    void check_invariants() const;

private:
    void build_topology(const std::map<EdgeKey, FaceLabel>& labels);

    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<Face> faces_;
    std::vector<std::array<int, 3>> cell_faces_;
    std::vector<std::array<int, 3>> cell_face_signs_;
    std::vector<double> areas_;
    std::vector<double> diameters_;
    std::vector<Point> centroids_;
    std::vector<int> parent_;
};

/// L-shaped domain (-1,1)^2 \ [0,1)x(-1,0] split into 6 triangles through the origin.
Mesh lshape_initial();

/// Bisects every edge: each cell gets 4 children and h_max halves.
Mesh refine_uniform(const Mesh& mesh);

/// Newest-vertex bisection of the marked cells plus conforming closure.
Mesh refine_bisect(const Mesh& mesh, const std::vector<int>& marked_cells);

/// Text format: "NV NC", NV lines "x y", NC lines "i j k [l0 l1 l2]" where l_i
/// labels local edge i (opposite vertex i): 0 interior/unlabelled, 1 Dirichlet,
/// 2 Neumann.
Mesh read_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, const std::string& path);

} // namespace hhodual
