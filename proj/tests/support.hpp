#pragma once

#include <string>

#include <gtest/gtest.h>

#include "qot/herm.hpp"
#include "qot/random.hpp"

namespace qot::test {

inline ::testing::AssertionResult close(const ComplexMatrix& a,
                                        const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return ::testing::AssertionFailure() << "shape mismatch";
  }
  const double err = (a - b).norm();
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure()
         << "||a - b||_F = " << err << " > " << tol << "\na =\n"
         << a << "\nb =\n"
         << b;
}

inline ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline const cplx I1(0.0, 1.0);

}  // namespace qot::test
