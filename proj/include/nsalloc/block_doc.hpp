// SPDX-License-Identifier: Apache-2.0
//
// Plain-text data files made of named blocks:
//
//   # comment
//   matrix A 2 3
//   1 2 3
//   4 5 6
//   vector b 2
//   0.5 -0.5
//   scalar T
//   0.01
//
// Whitespace separated, '#' starts a comment anywhere on a line.

#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "nsalloc/linalg.hpp"

namespace nsalloc {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BlockDoc {
    std::map<std::string, Matrix> matrices;
    std::map<std::string, Vector> vectors;
    std::map<std::string, double> scalars;

    const Matrix& require_matrix(const std::string& name, int rows, int cols) const;
    const Vector& require_vector(const std::string& name, int size) const;
    double require_scalar(const std::string& name) const;
};

BlockDoc parse_block_doc(std::istream& in, const std::string& origin = "<stream>");
BlockDoc load_block_doc(const std::string& path);

}  // namespace nsalloc
