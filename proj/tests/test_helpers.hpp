#pragma once

#include "nepv/config.hpp"
#include "nepv/linalg.hpp"

namespace nepv::test {

inline Matrix random_matrix(Index rows, Index cols, Xorshift64Star& rng) {
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) M(i, j) = rng.symmetric();
  return M;
}

inline Matrix random_symmetric(Index n, Xorshift64Star& rng) {
  Matrix M = random_matrix(n, n, rng);
  return 0.5 * (M + M.transpose());
}

inline Matrix random_orthonormal(Index n, Index p, Xorshift64Star& rng) {
  return linalg::thin_qr(random_matrix(n, p, rng)).Q;
}

} // namespace nepv::test
