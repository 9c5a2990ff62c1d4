// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/block_doc.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace nsalloc {

namespace {

// Pulls the next whitespace-separated token, skipping '#' comments.
class TokenStream {
  public:
    TokenStream(std::istream& in, std::string origin)
        : in_(in), origin_(std::move(origin)) {}

    bool next(std::string& tok) {
        while (true) {
            if (pos_ >= line_.size()) {
                if (!std::getline(in_, line_)) return false;
                ++line_no_;
                pos_ = 0;
                continue;
            }
            const char c = line_[pos_];
            if (c == '#') {
                pos_ = line_.size();
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
                continue;
            }
            std::size_t end = pos_;
            while (end < line_.size() && line_[end] != '#' &&
                   !std::isspace(static_cast<unsigned char>(line_[end])))
                ++end;
            tok = line_.substr(pos_, end - pos_);
            pos_ = end;
            return true;
        }
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(origin_ + ":" + std::to_string(line_no_) + ": " + msg);
    }

    double number(const std::string& context) {
        std::string tok;
        if (!next(tok)) fail("unexpected end of input while reading " + context);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(tok, &used);
        } catch (const std::exception&) {
            fail("expected a number for " + context + ", got '" + tok + "'");
        }
        if (used != tok.size())
            fail("expected a number for " + context + ", got '" + tok + "'");
        return value;
    }

    int positive_int(const std::string& context) {
        const double value = number(context);
        const int n = static_cast<int>(value);
        if (n <= 0 || static_cast<double>(n) != value)
            fail(context + " must be a positive integer");
        return n;
    }

  private:
    std::istream& in_;
    std::string origin_;
    std::string line_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

}  // namespace

BlockDoc parse_block_doc(std::istream& in, const std::string& origin) {
    TokenStream ts(in, origin);
    BlockDoc doc;
    std::string kw;
    while (ts.next(kw)) {
        std::string name;
        if (!ts.next(name)) ts.fail("missing name after '" + kw + "'");
        if (kw == "matrix") {
            const int rows = ts.positive_int("row count of " + name);
            const int cols = ts.positive_int("column count of " + name);
            Matrix mat(rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    mat(r, c) = ts.number(name + "(" + std::to_string(r + 1) + "," +
                                          std::to_string(c + 1) + ")");
            doc.matrices[name] = std::move(mat);
        } else if (kw == "vector") {
            const int size = ts.positive_int("length of " + name);
            Vector vec(size);
            for (int i = 0; i < size; ++i)
                vec(i) = ts.number(name + "(" + std::to_string(i + 1) + ")");
            doc.vectors[name] = std::move(vec);
        } else if (kw == "scalar") {
            doc.scalars[name] = ts.number(name);
        } else {
            ts.fail("unknown keyword '" + kw + "' (expected matrix, vector, scalar)");
        }
    }
    return doc;
}

BlockDoc load_block_doc(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return parse_block_doc(in, path);
}

const Matrix& BlockDoc::require_matrix(const std::string& name, int rows,
                                       int cols) const {
    auto it = matrices.find(name);
    if (it == matrices.end()) throw ParseError("missing matrix '" + name + "'");
    if (it->second.rows() != rows || it->second.cols() != cols)
        throw ParseError("matrix '" + name + "' must be " + std::to_string(rows) +
                         "x" + std::to_string(cols) + ", got " +
                         std::to_string(it->second.rows()) + "x" +
                         std::to_string(it->second.cols()));
    return it->second;
}

const Vector& BlockDoc::require_vector(const std::string& name, int size) const {
    auto it = vectors.find(name);
    if (it == vectors.end()) throw ParseError("missing vector '" + name + "'");
    if (it->second.size() != size)
        throw ParseError("vector '" + name + "' must have length " +
                         std::to_string(size) + ", got " +
                         std::to_string(it->second.size()));
    return it->second;
}

double BlockDoc::require_scalar(const std::string& name) const {
    auto it = scalars.find(name);
    if (it == scalars.end()) throw ParseError("missing scalar '" + name + "'");
    return it->second;
}

}  // namespace nsalloc
