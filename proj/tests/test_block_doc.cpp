// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "nsalloc/block_doc.hpp"

using namespace nsalloc;

TEST_CASE("block documents round-trip matrices, vectors, and scalars") {
    std::istringstream in(R"(# demo file
matrix A 2 3
1 2 3
4 5 6   # trailing comment
vector b 2
0.5 -0.5
scalar T
0.01
)");
    const BlockDoc doc = parse_block_doc(in, "demo");
    const Matrix& A = doc.require_matrix("A", 2, 3);
    CHECK(A(1, 2) == 6.0);
    const Vector& b = doc.require_vector("b", 2);
    CHECK(b(1) == -0.5);
    CHECK(doc.require_scalar("T") == 0.01);
}

TEST_CASE("numbers may flow across lines inside a block") {
    std::istringstream in("vector long 5\n1 2\n3\n4 5\n");
    const BlockDoc doc = parse_block_doc(in);
    CHECK(doc.require_vector("long", 5)(4) == 5.0);
}

TEST_CASE("parse errors carry origin, line, and field context") {
    std::istringstream bad_keyword("table X 2 2\n");
    CHECK_THROWS_WITH_AS(parse_block_doc(bad_keyword, "f.txt"),
                         doctest::Contains("unknown keyword 'table'"), ParseError);

    std::istringstream bad_number("matrix A 2 2\n1 2\n3 oops\n");
    CHECK_THROWS_WITH_AS(parse_block_doc(bad_number, "f.txt"),
                         doctest::Contains("A(2,2)"), ParseError);

    std::istringstream truncated("vector v 3\n1 2\n");
    CHECK_THROWS_WITH_AS(parse_block_doc(truncated, "f.txt"),
                         doctest::Contains("unexpected end"), ParseError);

    std::istringstream bad_dim("matrix A 0 2\n");
    CHECK_THROWS_AS(parse_block_doc(bad_dim, "f.txt"), ParseError);
}

TEST_CASE("require helpers name the missing or misshapen field") {
    std::istringstream in("vector v 2\n1 2\n");
    const BlockDoc doc = parse_block_doc(in);
    CHECK_THROWS_WITH_AS((void)doc.require_vector("w", 2),
                         doctest::Contains("missing vector 'w'"), ParseError);
    CHECK_THROWS_WITH_AS((void)doc.require_vector("v", 3),
                         doctest::Contains("length 3"), ParseError);
    CHECK_THROWS_WITH_AS((void)doc.require_matrix("v", 1, 2),
                         doctest::Contains("missing matrix 'v'"), ParseError);
}

TEST_CASE("loading a missing file reports the path") {
    CHECK_THROWS_WITH_AS((void)load_block_doc("/no/such/file.txt"),
                         doctest::Contains("/no/such/file.txt"), ParseError);
}
