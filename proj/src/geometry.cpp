#include "nnequiv/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "nnequiv/network.hpp"

namespace nnequiv {

void Polytope::add_row(const Vec& row, double rhs) {
  if (static_cast<int>(row.size()) != dim)
    throw DimensionError("polytope row length does not match dim");
  A.append_row(row);
  b.push_back(rhs);
}

void Polytope::pad_to(int new_dim) {
  if (new_dim < dim) throw DimensionError("polytope pad_to cannot shrink");
  while (dim < new_dim) {
    A.append_zero_col();
    ++dim;
  }
}

bool Polytope::contains(const Vec& alpha, double tol) const {
  if (static_cast<int>(alpha.size()) != dim) return false;
  for (double v : alpha)
    if (v < -1.0 - tol || v > 1.0 + tol) return false;
  for (int i = 0; i < A.rows(); ++i)
    if (kern::dot(A.row(i), alpha.data(), alpha.size()) > b[i] + tol) return false;
  return true;
}

StarSet affine_map(const StarSet& s, const Mat& w, const Vec& bias) {
  if (w.cols() != s.n()) throw DimensionError("affine_map: W columns != set dimension");
  return StarSet{matvec(w, s.c, &bias), matmul(w, s.G), s.pred};
}

Zonotope affine_map(const Zonotope& z, const Mat& w, const Vec& bias) {
  if (w.cols() != z.n()) throw DimensionError("affine_map: W columns != set dimension");
  return Zonotope{matvec(w, z.c, &bias), matmul(w, z.G), z.k_input, z.tags};
}

std::pair<double, double> zono_interval_row(double c, const double* row, int k) {
  double r = kern::abs_sum(row, static_cast<std::size_t>(k));
  return {c - r, c + r};
}

std::pair<double, double> zono_interval(const Zonotope& z, int dim) {
  return zono_interval_row(z.c[dim], z.G.row(dim), z.G.cols());
}

std::pair<StarSet, StarSet> split_relu(const StarSet& s, int neuron) {
  Vec g = s.G.row_vec(neuron);
  double c = s.c[neuron];

  StarSet pos = s;
  Vec neg_g(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) neg_g[j] = -g[j];
  pos.pred.add_row(neg_g, c);  // value >= 0

  StarSet neg = s;
  neg.pred.add_row(g, -c);  // value <= 0
  neg.c[neuron] = 0.0;
  neg.G.zero_row(neuron);

  return {std::move(neg), std::move(pos)};
}

Zonotope overapprox_relu(const Zonotope& z, int dim, double lo, double hi, ErrorTag tag) {
  if (!(lo < 0.0 && 0.0 < hi))
    throw std::invalid_argument("overapprox_relu requires a straddling neuron (lo < 0 < hi)");
  double lambda = hi / (hi - lo);
  double mu = -lambda * lo / 2.0;

  Zonotope out = z;
  kern::scale(out.G.row(dim), lambda, static_cast<std::size_t>(out.G.cols()));
  out.c[dim] = lambda * z.c[dim] + mu;
  out.G.append_zero_col();
  out.G(dim, out.G.cols() - 1) = mu;
  out.tags.push_back(tag);
  return out;
}

StarSet init_star(const InputBox& box) {
  box.validate();
  int n = box.dim();
  Vec c(n), half(n);
  for (int i = 0; i < n; ++i) {
    c[i] = (box.lo[i] + box.hi[i]) / 2.0;
    half[i] = (box.hi[i] - box.lo[i]) / 2.0;
  }
  return StarSet{c, Mat::diag(half), Polytope::box_only(n)};
}

Zonotope init_zono(const InputBox& box) {
  StarSet s = init_star(box);
  return Zonotope{std::move(s.c), std::move(s.G), box.dim(), {}};
}

namespace {

int tag_index_of(const std::vector<ErrorTag>& tags, const ErrorTag& t) {
  for (std::size_t i = 0; i < tags.size(); ++i)
    if (tags[i] == t) return static_cast<int>(i);
  return -1;
}

}  // namespace

MappedRow map_row_to_pred(const double* row, int k_input, const std::vector<ErrorTag>& row_tags,
                          int pred_dim, const std::vector<ErrorTag>& pred_tags) {
  MappedRow m;
  m.g.assign(pred_dim, 0.0);
  for (int j = 0; j < k_input; ++j) m.g[j] = row[j];
  for (std::size_t e = 0; e < row_tags.size(); ++e) {
    double v = row[k_input + static_cast<int>(e)];
    if (v == 0.0) continue;
    int p = tag_index_of(pred_tags, row_tags[e]);
    if (p >= 0) m.g[k_input + p] += v;
    else m.free_abs += std::fabs(v);
  }
  return m;
}

DiffSet make_diff(const StoredOutput& out_r, const StoredOutput& out_t,
                  const Polytope& pred, const std::vector<ErrorTag>& pred_tags) {
  if (out_r.c.size() != out_t.c.size())
    throw DimensionError("make_diff: output dimensions differ");
  if (out_r.k_input != out_t.k_input)
    throw DimensionError("make_diff: input variable counts differ");
  int o = static_cast<int>(out_r.c.size());
  int k_in = out_r.k_input;
  if (pred.dim != k_in + static_cast<int>(pred_tags.size()))
    throw DimensionError("make_diff: predicate dim does not match k_input + pred_tags");

  DiffSet d;
  d.pred = pred;
  d.dc.resize(o);
  for (int i = 0; i < o; ++i) d.dc[i] = out_r.c[i] - out_t.c[i];

  // Error tags not covered by the predicate, in R-then-T column order.
  std::vector<ErrorTag> free_tags;
  for (const auto& t : out_r.tags)
    if (tag_index_of(pred_tags, t) < 0) free_tags.push_back(t);
  for (const auto& t : out_t.tags)
    if (tag_index_of(pred_tags, t) < 0 && tag_index_of(out_r.tags, t) < 0) free_tags.push_back(t);

  d.dG_pred = Mat(o, pred.dim);
  d.dG_free = Mat(o, static_cast<int>(free_tags.size()));
  d.free_tags = free_tags;

  auto scatter = [&](const StoredOutput& out, double sign) {
    for (int i = 0; i < o; ++i) {
      const double* row = out.G.row(i);
      for (int j = 0; j < k_in; ++j) d.dG_pred(i, j) += sign * row[j];
      for (std::size_t e = 0; e < out.tags.size(); ++e) {
        double v = sign * row[k_in + static_cast<int>(e)];
        if (v == 0.0) continue;
        int p = tag_index_of(pred_tags, out.tags[e]);
        if (p >= 0) d.dG_pred(i, k_in + p) += v;
        else d.dG_free(i, tag_index_of(free_tags, out.tags[e])) += v;
      }
    }
  };
  scatter(out_r, 1.0);
  scatter(out_t, -1.0);
  return d;
}

}  // namespace nnequiv
