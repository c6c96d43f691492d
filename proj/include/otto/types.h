#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace otto {

// Row i of an embedding matrix is the vector of word i.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Binary alignment matrices are stored as 0/1 bytes.
using BinaryMatrix = Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace otto
