// tests/unit/test_util.h
#ifndef TCLSV_TESTS_TEST_UTIL_H_
#define TCLSV_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <string>

#include "tclsv/random.h"
#include "tclsv/types.h"

namespace tclsv::testing {

inline Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, Rng &rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.Gaussian();
  return m;
}

inline std::filesystem::path FreshDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("tclsv_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tclsv::testing

#endif  // TCLSV_TESTS_TEST_UTIL_H_
