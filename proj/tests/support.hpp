#pragma once

// Constructions shared by the unit tests. Expected values in the tests are
// read off these explicit models rather than computed by the library.

#include "morita/bimodule.hpp"
#include "morita/dynamics.hpp"

namespace morita::test {


inline const Tolerance kTol;

inline CMatrix unit_matrix(Index n, Index p, Index q) {
  CMatrix e = CMatrix::Zero(n, n);
  e(p, q) = 1.0;
  return e;
}

inline CMatrix random_unitary(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return polar_unitary(rng.complex_matrix(n, n));
}

// Direct construction of the module sum_j C^{k_j} (x) (row vectors of length
// n_j) over A = sum_i M_{a_i} and B = sum_j M_{n_j}, where A_i sits in
// M_{k_j} with multiplicity mult[i][j]. Coordinates are (j, r, q) with r the
// C^{k_j} index.
inline BimodulePtr block_module(const std::vector<Index>& a_blocks, const std::vector<Index>& b_blocks,
                         const std::vector<std::vector<Index>>& mult) {
  auto A = MatrixAlgebra::canonical(a_blocks, "A");
  auto B = MatrixAlgebra::canonical(b_blocks, "B");
  std::vector<Index> ks(b_blocks.size(), 0), offs;
  for (std::size_t j = 0; j < b_blocks.size(); ++j)
    for (std::size_t i = 0; i < a_blocks.size(); ++i) ks[j] += mult[i][j] * a_blocks[i];
  Index d = 0;
  for (std::size_t j = 0; j < b_blocks.size(); ++j) {
    offs.push_back(d);
    d += ks[j] * b_blocks[j];
  }
  std::vector<CMatrix> left, right, inner;
  for (std::size_t i = 0; i < a_blocks.size(); ++i)
    for (Index p = 0; p < a_blocks[i]; ++p)
      for (Index q = 0; q < a_blocks[i]; ++q) {
        CMatrix l = CMatrix::Zero(d, d);
        for (std::size_t j = 0; j < b_blocks.size(); ++j) {
          // kappa_j(e^{(i)}_{pq}) inside M_{k_j}: copies ordered i major.
          Index base = 0;
          for (std::size_t i2 = 0; i2 < i; ++i2) base += mult[i2][j] * a_blocks[i2];
          CMatrix kj = CMatrix::Zero(ks[j], ks[j]);
          for (Index c = 0; c < mult[i][j]; ++c)
            kj(base + c * a_blocks[i] + p, base + c * a_blocks[i] + q) = 1.0;
          l.block(offs[j], offs[j], ks[j] * b_blocks[j], ks[j] * b_blocks[j]) =
              kron(kj, identity(b_blocks[j]));
        }
        left.push_back(l);
      }
  for (std::size_t j = 0; j < b_blocks.size(); ++j)
    for (Index p = 0; p < b_blocks[j]; ++p)
      for (Index q = 0; q < b_blocks[j]; ++q) {
        CMatrix r = CMatrix::Zero(d, d), g = CMatrix::Zero(d, d);
        const Index n = b_blocks[j], sz = ks[j] * n;
        r.block(offs[j], offs[j], sz, sz) = kron(identity(ks[j]), unit_matrix(n, q, p));
        g.block(offs[j], offs[j], sz, sz) = kron(identity(ks[j]), unit_matrix(n, p, q));
        right.push_back(r);
        inner.push_back(g);
      }
  return make_bimodule(A, B, left, right, inner, "blocks");
}

inline BimodulePtr conjugated(const BimodulePtr& x, const CMatrix& u) {
  auto conj = [&](const std::vector<CMatrix>& ms) {
    std::vector<CMatrix> out;
    for (const auto& m : ms) out.push_back(u * m * u.adjoint());
    return out;
  };
  return make_bimodule(x->left, x->right, conj(x->left_action), conj(x->right_action),
                       conj(x->inner), x->name + "'");
}

inline BimodulePtr scalar_module(Index n) {
  auto c = MatrixAlgebra::canonical({1}, "C");
  return make_bimodule(c, c, {identity(n)}, {identity(n)}, {identity(n)}, "C^" + std::to_string(n));
}

inline StarHom hom(AlgebraPtr s, AlgebraPtr t, CMatrix m) { return {std::move(s), std::move(t), std::move(m)}; }

// C + C -> M_2 by diagonal entries, in the order given.
inline StarHom diagonal_hom(AlgebraPtr cc, AlgebraPtr m2, Index first, Index second) {
  CMatrix m = CMatrix::Zero(4, 2);
  m(0, first) = 1.0;
  m(3, second) = 1.0;
  return hom(std::move(cc), std::move(m2), m);
}


// G acting on C(G) = C^{|G|} by left translation: delta_t -> delta_{st}.
inline GroupAction translation_action(const GroupPtr& g) {
  auto cg = MatrixAlgebra::canonical(std::vector<Index>(static_cast<std::size_t>(g->order), 1), "C(G)");
  std::vector<CMatrix> maps;
  for (int s = 0; s < g->order; ++s) {
    CMatrix m = CMatrix::Zero(g->order, g->order);
    for (int t = 0; t < g->order; ++t) m((*g)(s, t), t) = 1.0;
    maps.push_back(m);
  }
  return make_action(cg, g, maps);
}

// Inner action s -> Ad u^s on M_n for a unitary u with u^order = 1 of a
// cyclic group.
inline GroupAction inner_cyclic_action(const GroupPtr& g, Index n, const CMatrix& u) {
  auto mn = MatrixAlgebra::canonical({n}, "M" + std::to_string(n));
  std::vector<CMatrix> maps;
  CMatrix p = identity(n);
  for (int s = 0; s < g->order; ++s) {
    CMatrix m(n * n, n * n);
    for (Index k = 0; k < n * n; ++k) m.col(k) = flatten(p * mn->basis_matrix(k) * p.adjoint());
    maps.push_back(m);
    p = u * p;
  }
  return make_action(mn, g, maps);
}

}  // namespace morita::test
