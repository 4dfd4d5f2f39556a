// Copyright 2026 The optforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "optforge/dsl.hpp"
#include "oracles.hpp"

namespace {

using namespace optforge;
using dsl::DslError;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> corpus() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(OPTFORGE_SOURCE_DIR) / "circuits"))
    if (e.path().extension() == ".opt") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

DslError::Kind error_kind(const std::string& src) {
  try {
    dsl::run(src);
  } catch (const DslError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << src;
  return DslError::Kind::Lexical;
}

std::string error_text(const std::string& src) {
  try {
    dsl::run(src);
  } catch (const DslError& e) {
    return e.what();
  }
  return "";
}

// Test-side literal rendering, independent of the library printer.
std::string lit(const MatrixXcd& m) {
  std::string out = "[";
  char buf[96];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += i ? ", [" : "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", m(i, j).real(), m(i, j).imag());
      out += (j ? ", " : "") + std::string(buf);
    }
    out += "]";
  }
  return out + "]";
}

const char* kOneSeq = "system Q: quantum(2)\nstate r: Q = ket0\neffect m: Q = ket0\ncircuit = r ; m";

TEST(DslParse, SingleSequenceNode) {
  const dsl::Circuit c = dsl::parse(kOneSeq);
  ASSERT_EQ(c.decls.size(), 3u);
  EXPECT_EQ(c.decls[0].kind, dsl::Decl::Kind::System);
  EXPECT_EQ(c.decls[0].theory, "quantum");
  EXPECT_EQ(c.decls[0].dim, 2);
  ASSERT_EQ(c.wiring->kind, dsl::Expr::Kind::Seq);
  EXPECT_EQ(c.wiring->lhs->name, "r");
  EXPECT_EQ(c.wiring->rhs->name, "m");
  EXPECT_EQ(c.wiring->pos.line, 4);
  EXPECT_EQ(c.wiring->pos.col, 13);
  EXPECT_NEAR(dsl::run(kOneSeq).at({}), 1.0, 1e-12);
}

TEST(DslParse, PrecedenceAndParentheses) {
  const dsl::Circuit c = dsl::parse(
      "system A: quantum(2)\nstate p: A = ket0\neffect e: A = discard\n"
      "circuit = p | p ; e | (e ; id(I))");
  ASSERT_EQ(c.wiring->kind, dsl::Expr::Kind::Seq);
  EXPECT_EQ(c.wiring->lhs->kind, dsl::Expr::Kind::Par);
  EXPECT_EQ(c.wiring->rhs->kind, dsl::Expr::Kind::Par);
  EXPECT_EQ(c.wiring->rhs->rhs->kind, dsl::Expr::Kind::Seq);
}

TEST(DslParse, SyntaxErrorAtEndOfInput) {
  const std::string src = "system Q: quantum(2)\nstate r: Q = ket0\ncircuit = r ;";
  try {
    dsl::parse(src);
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.kind(), DslError::Kind::Syntax);
    EXPECT_EQ(e.pos().line, 3);
    EXPECT_EQ(e.pos().col, 14);
    EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos) << e.what();
  }
}

TEST(DslParse, LexicalAndSyntaxErrorsCarryPositions) {
  try {
    dsl::parse("system Q: quantum(2)\nstate r: Q = ket0\ncircuit = r $ r");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.kind(), DslError::Kind::Lexical);
    EXPECT_EQ(e.pos().line, 3);
    EXPECT_EQ(e.pos().col, 13);
  }
  try {
    dsl::parse("system Q quantum(2)\ncircuit = id(Q)");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.kind(), DslError::Kind::Syntax);
    EXPECT_EQ(e.pos().line, 1);
    EXPECT_EQ(e.pos().col, 10);
  }
  EXPECT_EQ(error_kind("system Q: quantum(2)\nstate r: Q = [[1, 0], [0 0]]\ncircuit = r"), DslError::Kind::Syntax);
  EXPECT_EQ(error_kind("system Q: quantum(2)\nstate r: Q = 1.5e\ncircuit = r"), DslError::Kind::Lexical);
  EXPECT_EQ(error_kind("system state: quantum(2)\ncircuit = id(I)"), DslError::Kind::Syntax);
  EXPECT_EQ(error_kind("system Q: quantum(2)\nstate r: Q = ket7\ncircuit = r"), DslError::Kind::Unresolved);
  EXPECT_EQ(error_kind("system Q: quantum(2)\ncircuit = q"), DslError::Kind::Unresolved);
  EXPECT_EQ(error_kind("system Q: quantum(2)\ncircuit = Q"), DslError::Kind::Unresolved);
  // Columns count code points, and comments may hold any UTF-8.
  try {
    dsl::parse("# état\nsystem Q: quantum(2) é");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.kind(), DslError::Kind::Lexical);
    EXPECT_EQ(e.pos().line, 2);
    EXPECT_EQ(e.pos().col, 22);
  }
}

TEST(DslParse, DuplicateIdentifiers) {
  const std::string src = "system Q: quantum(2)\nstate r: Q = ket0\neffect r: Q = discard\ncircuit = r";
  EXPECT_EQ(error_kind(src), DslError::Kind::Duplicate);
  EXPECT_NE(error_text(src).find("2:7"), std::string::npos);
  EXPECT_EQ(error_kind("system Q: quantum(2)\nsystem Q: quantum(3)\ncircuit = id(I)"), DslError::Kind::Duplicate);
  EXPECT_EQ(error_kind("system Q: quantum(2)\ntest t: Q -> I = {a: ket0, a: ket1}\ncircuit = id(I)"),
            DslError::Kind::Duplicate);
}

TEST(DslTypecheck, WireMismatchNamesBothSystems) {
  const std::string src =
      "system Q: quantum(2)\nsystem T: quantum(3)\nstate r: Q = ket0\neffect m: T = ket0\ncircuit = r ; m";
  EXPECT_EQ(error_kind(src), DslError::Kind::WireMismatch);
  const std::string msg = error_text(src);
  EXPECT_NE(msg.find("quantum(2)"), std::string::npos) << msg;
  EXPECT_NE(msg.find("quantum(3)"), std::string::npos) << msg;
  EXPECT_EQ(error_kind("system Q: quantum(2)\nsystem C: classical(2)\nstate r: Q = ket0\nstate s: C = ket0\n"
                       "effect e: Q = discard\ncircuit = (r | s) ; e"),
            DslError::Kind::WireMismatch);
}

TEST(DslTypecheck, SwapBetweenMatchedBoxes) {
  const std::string src =
      "system A: quantum(2)\nsystem B: quantum(3)\nstate a: A = ket1\nstate b: B = maximally_mixed\n"
      "test ma: A -> I = computational_measurement\neffect db: B = discard\n"
      "circuit = a | b ; swap(A, B) ; db | ma";
  const dsl::TypedCircuit tc = dsl::typecheck(dsl::parse(src));
  EXPECT_EQ(tc.root->lhs->rhs->in.to_string(), "quantum(2)*quantum(3)");
  EXPECT_EQ(tc.root->lhs->rhs->out.to_string(), "quantum(3)*quantum(2)");
  const dsl::Distribution d = dsl::evaluate(tc);
  EXPECT_NEAR(d.at({"1"}), 1.0, 1e-12);
  // Swapping the wrong way round is a mismatch.
  EXPECT_EQ(error_kind("system A: quantum(2)\nsystem B: quantum(3)\nstate a: A = ket1\nstate b: B = ket0\n"
                       "effect da: A = discard\neffect db: B = discard\ncircuit = a | b ; swap(B, A) ; db | da"),
            DslError::Kind::WireMismatch);
}

TEST(DslTypecheck, OpenWires) {
  EXPECT_EQ(error_kind("system Q: quantum(2)\nstate r: Q = ket0\ncircuit = r"), DslError::Kind::OpenWires);
  EXPECT_EQ(error_kind("system Q: quantum(2)\ncircuit = id(Q)"), DslError::Kind::OpenWires);
  EXPECT_NEAR(dsl::run("system Q: quantum(2)\ncircuit = id(I)").at({}), 1.0, 0.0);
}

TEST(DslTypecheck, NonNormalizedTestReportsMaxEigenvalue) {
  const MatrixXcd e1 = oracle::proj(oracle::ket(2, 0)) + 0.3 * oracle::proj(oracle::ket(2, 1));
  MatrixXcd v(2, 1);
  v << 1, oracle::cd(0, 1);
  const MatrixXcd e2 = 0.4 * oracle::proj(v);
  const double top = oracle::eigvals(e1 + e2).maxCoeff();
  ASSERT_GT(top, 1.0);
  const std::string src = "system Q: quantum(2)\nstate r: Q = ket0\ntest t: Q -> I = {a: " + lit(e1) +
                          ", b: " + lit(e2) + "}\ncircuit = r ; t";
  EXPECT_EQ(error_kind(src), DslError::Kind::NotNormalized);
  const std::string msg = error_text(src);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", top);
  const std::size_t at = msg.find("max eigenvalue ");
  ASSERT_NE(at, std::string::npos) << msg;
  EXPECT_NEAR(std::stod(msg.substr(at + 15)), top, 1e-12) << msg << " vs " << buf;
  // Sub-normalized tests fail too; so does a non-trace-preserving channel.
  EXPECT_EQ(error_kind("system Q: quantum(2)\ntest t: Q -> I = {a: ket0}\ncircuit = id(I)"),
            DslError::Kind::NotNormalized);
  EXPECT_EQ(error_kind("system Q: quantum(2)\nchannel c: Q -> Q = kraus{[[1, 0], [0, 0.5]]}\ncircuit = id(I)"),
            DslError::Kind::NotNormalized);
}

TEST(DslTypecheck, InvalidLiterals) {
  EXPECT_EQ(error_kind("system Q: quantum(2)\nstate r: Q = [[1, 0], [0, 0], [0, 0]]\ncircuit = id(I)"),
            DslError::Kind::Literal);
  EXPECT_EQ(error_kind("system Q: quantum(2)\nstate r: Q = [[1.5, 0], [0, -0.5]]\ncircuit = id(I)"),
            DslError::Kind::Literal);
  EXPECT_NE(error_text("system Q: quantum(2)\nstate r: Q = [[1.5, 0], [0, -0.5]]\ncircuit = id(I)")
                .find("min eigenvalue -0.5"),
            std::string::npos);
  EXPECT_EQ(error_kind("system B: realqt(2)\nstate r: B = [[0.5, (0, 0.1)], [(0, -0.1), 0.5]]\ncircuit = id(I)"),
            DslError::Kind::Literal);
  EXPECT_EQ(error_kind("system C: classical(2)\nstate r: C = bell\ncircuit = id(I)"), DslError::Kind::Literal);
  EXPECT_EQ(error_kind("system Q: quantum(2)\nstate r: Q = discard\ncircuit = id(I)"), DslError::Kind::Literal);
  EXPECT_EQ(error_kind("system Q: quantum(9)\ncircuit = id(I)"), DslError::Kind::Literal);
  EXPECT_EQ(error_kind("system Q: qubits(2)\ncircuit = id(I)"), DslError::Kind::Unresolved);
}

TEST(DslEvaluate, PrepareAndMeasure) {
  const dsl::Distribution d = dsl::run(
      "system Q: quantum(2)\nstate r: Q = ket0\ntest m: Q -> I = computational_measurement\ncircuit = r ; m");
  ASSERT_EQ(d.entries.size(), 2u);
  EXPECT_NEAR(d.at({"0"}), 1.0, 1e-12);
  EXPECT_NEAR(d.at({"1"}), 0.0, 1e-12);
  EXPECT_EQ(d.to_json().dump(), R"j({"(0)":1.0,"(1)":0.0})j");
}

TEST(DslEvaluate, TeleportationFile) {
  const dsl::Distribution d = dsl::run(slurp(std::filesystem::path(OPTFORGE_SOURCE_DIR) / "circuits/teleport.opt"));
  EXPECT_NEAR(d.at({"win"}), 0.25, 1e-9);
  EXPECT_NEAR(d.total(), 1.0, 1e-9);
}

TEST(DslEvaluate, TeleportationSucceedsWithOneOverDSquared) {
  for (int dim : {2, 3}) {
    const VectorXcd om = oracle::omega(dim);
    const MatrixXcd win = oracle::proj(om);
    const MatrixXcd lose = MatrixXcd::Identity(dim * dim, dim * dim) - win;
    std::mt19937_64 rng(static_cast<std::uint64_t>(dim));
    const MatrixXcd rho = oracle::random_density(dim, rng);
    const std::string src = "system A: quantum(" + std::to_string(dim) + ")\nstate psi: A = " + lit(rho) +
                            "\nstate phi: A*A = bell\ntest tele: A*A -> I = {win: bell, lose: " + lit(lose) +
                            "}\neffect trash: A = discard\ncircuit = psi | phi ; tele | id(A) ; trash";
    const dsl::Distribution d = dsl::run(src);
    EXPECT_NEAR(d.at({"win"}), 1.0 / (dim * dim), 1e-9) << dim;
  }
}

// ρ on A*A, a channel on the first wire, a projective test on both.
TEST(DslEvaluate, RandomThreeBoxCircuitMatchesDenseOracle) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    std::mt19937_64 rng(seed);
    const int dim = seed % 2 ? 2 : 3;
    const int n = dim * dim;
    const MatrixXcd rho = oracle::random_density(n, rng);
    const MatrixXcd u = oracle::random_unitary(2 * dim, rng);  // dilation on A ⊗ C², ancilla second
    std::vector<MatrixXcd> ks;
    for (int k = 0; k < 2; ++k) {
      MatrixXcd kk(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) kk(i, j) = u(i * 2 + k, j * 2);
      ks.push_back(kk);
    }
    const MatrixXcd w = oracle::random_unitary(n, rng);
    std::string src = "system A: quantum(" + std::to_string(dim) + ")\nstate rho: A*A = " + lit(rho) +
                      "\nchannel k: A -> A = kraus{" + lit(ks[0]) + ", " + lit(ks[1]) + "}\ntest m: A*A -> I = {";
    std::vector<MatrixXcd> povm;
    for (int x = 0; x < n; ++x) {
      povm.push_back(oracle::proj(w.col(x)));
      src += (x ? ", o" : "o") + std::to_string(x) + ": " + lit(povm.back());
    }
    const bool swapped = seed > 2;
    src += swapped ? "}\ncircuit = rho ; swap(A, A) ; k | id(A) ; m" : "}\ncircuit = rho ; k | id(A) ; m";
    const dsl::Distribution d = dsl::run(src);

    const MatrixXcd id = MatrixXcd::Identity(dim, dim);
    MatrixXcd state = rho;
    if (swapped) {
      MatrixXcd sw = MatrixXcd::Zero(n, n);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) sw(j * dim + i, i * dim + j) = 1;
      state = sw * state * sw.adjoint();
    }
    MatrixXcd out = MatrixXcd::Zero(n, n);
    for (const auto& kk : ks) {
      const MatrixXcd big = oracle::kron(kk, id);
      out += big * state * big.adjoint();
    }
    double total = 0;
    for (int x = 0; x < n; ++x) {
      const double p = (povm[static_cast<std::size_t>(x)] * out).trace().real();
      EXPECT_NEAR(d.at({"o" + std::to_string(x)}), p, 1e-9) << "seed " << seed << " outcome " << x;
      total += p;
    }
    EXPECT_NEAR(d.total(), 1.0, 1e-9);
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(DslEvaluate, JointOutcomesFollowDeclarationOrder) {
  // zb is declared before za, so it owns the first tuple coordinate.
  const dsl::Distribution d = dsl::run(
      "system A: quantum(2)\nstate p: A = ket0\nstate q: A = ket1\ntest zb: A -> I = computational_measurement\n"
      "test za: A -> I = computational_measurement\ncircuit = (p | q) ; (za | zb)");
  EXPECT_NEAR(d.at({"1", "0"}), 1.0, 1e-12);
  EXPECT_EQ(d.slots.front().test, "zb");
}

TEST(DslEvaluate, ClassicalCircuit) {
  const dsl::Distribution d = dsl::run(slurp(std::filesystem::path(OPTFORGE_SOURCE_DIR) / "circuits/coin.opt"));
  EXPECT_NEAR(d.at({"heads"}), 0.9 * 0.8 + 0.3 * 0.2, 1e-12);
  EXPECT_NEAR(d.at({"tails"}), 0.1 * 0.8 + 0.7 * 0.2, 1e-12);
}

TEST(DslEvaluate, NonDeterministicLoneEventsFilter) {
  const dsl::TypedCircuit tc = dsl::typecheck(
      dsl::parse("system Q: quantum(2)\nstate r: Q = maximally_mixed\neffect m: Q = ket1\ncircuit = r ; m"));
  EXPECT_FALSE(tc.closed_normalized);
  EXPECT_NEAR(dsl::evaluate(tc).at({}), 0.5, 1e-12);
}

TEST(DslCorpus, PrintParseRoundTrip) {
  const auto files = corpus();
  ASSERT_GE(files.size(), 6u);
  for (const auto& f : files) {
    const dsl::Circuit c = dsl::parse(slurp(f));
    const std::string printed = dsl::print(c);
    const dsl::Circuit back = dsl::parse(printed);
    EXPECT_TRUE(back == c) << f;
    EXPECT_EQ(dsl::print(back), printed) << f;
  }
}

TEST(DslCorpus, DistributionsSumToOne) {
  for (const auto& f : corpus()) {
    const dsl::TypedCircuit tc = dsl::typecheck(dsl::parse(slurp(f)));
    ASSERT_TRUE(tc.closed_normalized) << f;
    const dsl::Distribution d = dsl::evaluate(tc);
    EXPECT_NEAR(d.total(), 1.0, 1e-9) << f;
    for (const auto& [o, p] : d.entries) EXPECT_GE(p, -1e-12) << f;
  }
}

TEST(DslCorpus, InvariantUnderInterchangeAndIdentityInsertion) {
  for (const auto& f : corpus()) {
    const dsl::TypedCircuit tc = dsl::typecheck(dsl::parse(slurp(f)));
    const dsl::Distribution base = dsl::evaluate(tc);
    for (dsl::Rewrite k : {dsl::Rewrite::Interchange, dsl::Rewrite::Exchange, dsl::Rewrite::Slide,
                           dsl::Rewrite::IdentityAfter, dsl::Rewrite::IdentityBefore}) {
      const int sites = dsl::rewrite_sites(tc, k);
      if (k == dsl::Rewrite::IdentityAfter || k == dsl::Rewrite::IdentityBefore) {
        EXPECT_GT(sites, 0) << f;
      }
      for (int s = 0; s < sites; ++s) {
        const dsl::Circuit r = dsl::rewrite(tc, k, s);
        EXPECT_FALSE(r == tc.ast);
        const dsl::Circuit reparsed = dsl::parse(dsl::print(r));
        EXPECT_TRUE(reparsed == r);
        EXPECT_LE(dsl::evaluate(dsl::typecheck(reparsed)).max_difference(base), 1e-9) << f << " site " << s;
      }
    }
  }
}

TEST(DslRewrite, InterchangeOnTeleportationShape) {
  const dsl::TypedCircuit tc = dsl::typecheck(dsl::parse(
      "system A: quantum(2)\nstate p: A = ket0\nstate q: A = [0.6, 0.8]\n"
      "channel x: A -> A = [[0, 1], [1, 0]]\ntest z: A -> I = computational_measurement\n"
      "circuit = (p | q) ; (x | id(A)) ; (z | z)"));
  EXPECT_EQ(dsl::rewrite_sites(tc, dsl::Rewrite::Interchange), 1);
  const dsl::Distribution base = dsl::evaluate(tc);
  EXPECT_NEAR(base.at({"1", "0"}), 0.36, 1e-12);
  // Apply two interchanges in a row.
  const dsl::TypedCircuit once = dsl::typecheck(dsl::rewrite(tc, dsl::Rewrite::Interchange, 0));
  EXPECT_EQ(dsl::print(*once.ast.wiring), "(p ; x) | (q ; id(A)) ; z | z");
  const dsl::TypedCircuit twice = dsl::typecheck(dsl::rewrite(once, dsl::Rewrite::Interchange, 0));
  EXPECT_EQ(dsl::print(*twice.ast.wiring), "(p ; x ; z) | (q ; id(A) ; z)");
  EXPECT_LE(dsl::evaluate(twice).max_difference(base), 1e-12);
}

TEST(DslPrint, RandomNumbersRoundTripExactly) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    dsl::Circuit c = dsl::parse("system Q: quantum(2)\nstate r: Q = [[1, 0], [0, 0]]\ncircuit = id(I)");
    for (auto& row : c.decls[1].literal.matrix)
      for (auto& x : row) x = {g(rng) * 1e-3, i % 2 == 0 ? g(rng) * 1e5 : 0.0, i % 2 == 0};
    EXPECT_TRUE(dsl::parse(dsl::print(c)) == c) << dsl::print(c);
  }
}

}  // namespace
