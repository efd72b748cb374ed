#include "hhodual/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hhodual {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

} // namespace

Mesh Mesh::from_triangles(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
                          const std::map<EdgeKey, FaceLabel>& labels)
{
    for (auto& t : cells) {
        for (int v : t) {
            if (v < 0 || v >= static_cast<int>(vertices.size()))
                throw MeshError("cell references vertex " + std::to_string(v) + " out of range");
        }
        if (signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0)
            std::swap(t[1], t[2]);
        // rotate so the longest edge is opposite local vertex 0
        int best = 0;
        double best_len = -1.0;
        for (int i = 0; i < 3; ++i) {
            const double len = (vertices[t[(i + 1) % 3]] - vertices[t[(i + 2) % 3]]).norm();
            if (len > best_len * (1.0 + 1e-12)) {
                best_len = len;
                best = i;
            }
        }
        std::rotate(t.begin(), t.begin() + best, t.end());
    }
    return from_ordered(std::move(vertices), std::move(cells), labels);
}

Mesh Mesh::from_ordered(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
                        const std::map<EdgeKey, FaceLabel>& labels, std::vector<int> parent)
{
    Mesh m;
    m.vertices_ = std::move(vertices);
    m.cells_ = std::move(cells);
    m.parent_ = std::move(parent);
    m.build_topology(labels);
    return m;
}

void Mesh::build_topology(const std::map<EdgeKey, FaceLabel>& labels)
{
    const int nc = num_cells();
    faces_.clear();
    cell_faces_.assign(nc, {-1, -1, -1});
    cell_face_signs_.assign(nc, {0, 0, 0});
    areas_.resize(nc);
    diameters_.resize(nc);
    centroids_.resize(nc);

    std::map<EdgeKey, int> lookup;
    for (int c = 0; c < nc; ++c) {
        const auto& t = cells_[c];
        const Point& a = vertices_[t[0]];
        const Point& b = vertices_[t[1]];
        const Point& d = vertices_[t[2]];
        areas_[c] = signed_area(a, b, d);
        if (!(areas_[c] > 0.0))
            throw MeshError("cell " + std::to_string(c) + " is not counterclockwise or is degenerate");
        centroids_[c] = (a + b + d) / 3.0;
        diameters_[c] = std::max({(a - b).norm(), (b - d).norm(), (d - a).norm()});

        for (int i = 0; i < 3; ++i) {
            const int v0 = t[(i + 1) % 3];
            const int v1 = t[(i + 2) % 3];
            const auto key = edge_key(v0, v1);
            auto it = lookup.find(key);
            if (it == lookup.end()) {
                Face f;
                f.vertices = {v0, v1};
                const Point e = vertices_[v1] - vertices_[v0];
                f.length = e.norm();
                f.normal = Point(e.y(), -e.x()) / f.length;
                f.cell_plus = c;
                lookup.emplace(key, static_cast<int>(faces_.size()));
                cell_faces_[c][i] = static_cast<int>(faces_.size());
                cell_face_signs_[c][i] = 1;
                faces_.push_back(f);
            } else {
                Face& f = faces_[it->second];
                if (f.cell_minus >= 0)
                    throw MeshError("edge shared by more than two cells");
                if (f.vertices[0] != v1 || f.vertices[1] != v0)
                    throw MeshError("inconsistent orientation between neighbouring cells");
                f.cell_minus = c;
                cell_faces_[c][i] = it->second;
                cell_face_signs_[c][i] = -1;
            }
        }
    }
    for (auto& f : faces_) {
        if (!f.is_boundary()) {
            f.label = FaceLabel::Interior;
            continue;
        }
        auto it = labels.find(edge_key(f.vertices[0], f.vertices[1]));
        f.label = (it != labels.end() && it->second != FaceLabel::Interior) ? it->second : FaceLabel::Dirichlet;
    }
}

double Mesh::h_max() const { return *std::max_element(diameters_.begin(), diameters_.end()); }

double Mesh::total_area() const
{
    double s = 0.0;
    for (double a : areas_) s += a;
    return s;
}

double Mesh::min_angle() const
{
    double best = std::numbers::pi;
    for (const auto& t : cells_) {
        for (int i = 0; i < 3; ++i) {
            const Point u = vertices_[t[(i + 1) % 3]] - vertices_[t[i]];
            const Point w = vertices_[t[(i + 2) % 3]] - vertices_[t[i]];
            best = std::min(best, std::acos(std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0)));
        }
    }
    return best;
}

std::map<EdgeKey, FaceLabel> Mesh::boundary_labels() const
{
    std::map<EdgeKey, FaceLabel> out;
    for (const auto& f : faces_) {
        if (f.is_boundary()) out[edge_key(f.vertices[0], f.vertices[1])] = f.label;
    }
    return out;
}

void Mesh::check_invariants() const
{
    std::vector<int> count(faces_.size(), 0);
    for (int c = 0; c < num_cells(); ++c) {
        if (!(areas_[c] > 0.0)) throw MeshError("non-positive cell area");
        for (int i = 0; i < 3; ++i) {
            const int f = cell_faces_[c][i];
            ++count[f];
            const Face& face = faces_[f];
            const int expected = face.cell_plus == c ? 1 : -1;
            if (cell_face_signs_[c][i] != expected) throw MeshError("cell/face sign mismatch");
            // outward normal of c on this edge
            const Point a = vertices_[cells_[c][(i + 1) % 3]];
            const Point b = vertices_[cells_[c][(i + 2) % 3]];
            const Point e = b - a;
            const Point outward = Point(e.y(), -e.x()).normalized();
            if ((outward - expected * face.normal).norm() > 1e-12)
                throw MeshError("face normal is not outward for cell_plus");
        }
    }
    for (int f = 0; f < num_faces(); ++f) {
        const Face& face = faces_[f];
        if (std::abs(face.normal.norm() - 1.0) > 1e-12) throw MeshError("face normal not unit length");
        if (face.is_boundary()) {
            if (count[f] != 1) throw MeshError("boundary face with wrong cell count");
            if (face.label == FaceLabel::Interior) throw MeshError("boundary face labelled interior");
        } else {
            if (count[f] != 2) throw MeshError("interior face not shared by two cells (hanging node)");
            if (face.label != FaceLabel::Interior) throw MeshError("interior face with boundary label");
        }
    }
}

Mesh lshape_initial()
{
    std::vector<Point> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}};
    std::vector<std::array<int, 3>> cells = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 6}, {0, 6, 7}};
    return Mesh::from_triangles(std::move(v), std::move(cells));
}

namespace {

// Recursive newest-vertex bisection of a single triangle whose vertex 0 is the
// newest vertex. Only edges present in `midpoints` are split.
void bisect_recursive(const std::array<int, 3>& t, int parent, const std::map<EdgeKey, int>& midpoints,
                      std::vector<std::array<int, 3>>& out, std::vector<int>& parents)
{
    auto it = midpoints.find(edge_key(t[1], t[2]));
    if (it == midpoints.end()) {
        out.push_back(t);
        parents.push_back(parent);
        return;
    }
    const int m = it->second;
    bisect_recursive({m, t[0], t[1]}, parent, midpoints, out, parents);
    bisect_recursive({m, t[2], t[0]}, parent, midpoints, out, parents);
}

Mesh refine_marked_edges(const Mesh& mesh, std::vector<char> marked)
{
    // closure: a cell with any marked edge must have its refinement edge marked
    bool changed = true;
    while (changed) {
        changed = false;
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const int ref = mesh.cell_face(c, mesh.refinement_edge(c));
            if (marked[ref]) continue;
            for (int i = 0; i < 3; ++i) {
                if (marked[mesh.cell_face(c, i)]) {
                    marked[ref] = 1;
                    changed = true;
                    break;
                }
            }
        }
    }
    std::vector<Point> vertices = mesh.vertices();
    std::map<EdgeKey, int> midpoints;
    auto labels = mesh.boundary_labels();
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!marked[f]) continue;
        const Face& face = mesh.face(f);
        const int m = static_cast<int>(vertices.size());
        vertices.push_back(0.5 * (mesh.vertex(face.vertices[0]) + mesh.vertex(face.vertices[1])));
        midpoints.emplace(edge_key(face.vertices[0], face.vertices[1]), m);
        if (face.is_boundary()) {
            labels.erase(edge_key(face.vertices[0], face.vertices[1]));
            labels[edge_key(face.vertices[0], m)] = face.label;
            labels[edge_key(m, face.vertices[1])] = face.label;
        }
    }
    std::vector<std::array<int, 3>> cells;
    std::vector<int> parents;
    cells.reserve(mesh.num_cells() * 2);
    for (int c = 0; c < mesh.num_cells(); ++c)
        bisect_recursive(mesh.cell(c), c, midpoints, cells, parents);
    return Mesh::from_ordered(std::move(vertices), std::move(cells), labels, std::move(parents));
}

} // namespace

Mesh refine_uniform(const Mesh& mesh)
{
    return refine_marked_edges(mesh, std::vector<char>(mesh.num_faces(), 1));
}

Mesh refine_bisect(const Mesh& mesh, const std::vector<int>& marked_cells)
{
    std::vector<char> marked(mesh.num_faces(), 0);
    for (int c : marked_cells) {
        if (c < 0 || c >= mesh.num_cells()) throw MeshError("marked cell index out of range");
        marked[mesh.cell_face(c, mesh.refinement_edge(c))] = 1;
    }
    if (marked_cells.empty()) {
        std::vector<int> identity(mesh.num_cells());
        for (int c = 0; c < mesh.num_cells(); ++c) identity[c] = c;
        return Mesh::from_ordered(mesh.vertices(), mesh.cells(), mesh.boundary_labels(), std::move(identity));
    }
    return refine_marked_edges(mesh, std::move(marked));
}

Mesh read_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file " + path);
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> std::istringstream {
        while (std::getline(in, line)) {
            ++line_no;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos != std::string::npos && line[pos] != '#') return std::istringstream(line);
        }
        throw MeshError(path + ": unexpected end of file after line " + std::to_string(line_no));
    };
    int nv = 0, nc = 0;
    {
        auto s = next_line();
        if (!(s >> nv >> nc) || nv < 3 || nc < 1)
            throw MeshError(path + ":" + std::to_string(line_no) + ": expected \"NV NC\"");
    }
    std::vector<Point> vertices(nv);
    for (int i = 0; i < nv; ++i) {
        auto s = next_line();
        if (!(s >> vertices[i].x() >> vertices[i].y()))
            throw MeshError(path + ":" + std::to_string(line_no) + ": expected \"x y\"");
    }
    std::vector<std::array<int, 3>> cells(nc);
    std::map<EdgeKey, FaceLabel> labels;
    for (int c = 0; c < nc; ++c) {
        auto s = next_line();
        auto& t = cells[c];
        if (!(s >> t[0] >> t[1] >> t[2]))
            throw MeshError(path + ":" + std::to_string(line_no) + ": expected \"i j k\"");
        int l[3];
        if (s >> l[0] >> l[1] >> l[2]) {
            for (int i = 0; i < 3; ++i) {
                if (l[i] < 0 || l[i] > 2)
                    throw MeshError(path + ":" + std::to_string(line_no) + ": boundary label must be 0, 1 or 2");
                if (l[i] == 0) continue;
                labels[edge_key(t[(i + 1) % 3], t[(i + 2) % 3])] =
                    l[i] == 1 ? FaceLabel::Dirichlet : FaceLabel::Neumann;
            }
        }
    }
    return Mesh::from_triangles(std::move(vertices), std::move(cells), labels);
}

void write_mesh(const Mesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write mesh file " + path);
    out.precision(17);
    out << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
    for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& t = mesh.cell(c);
        out << t[0] << ' ' << t[1] << ' ' << t[2];
        for (int i = 0; i < 3; ++i) {
            const Face& f = mesh.face(mesh.cell_face(c, i));
            int label = 0;
            if (f.label == FaceLabel::Dirichlet) label = 1;
            else if (f.label == FaceLabel::Neumann) label = 2;
            out << ' ' << label;
        }
        out << '\n';
    }
}

} // namespace hhodual
