#pragma once

// Random programs for checker soundness testing. Each program has one method
// under test, `subject`, committed to 0-2 events, and a driver that invokes it
// with every combination of branch inputs.

#include <random>
#include <string>

namespace ct {

enum class Shape { kStraight, kDiamond, kLoop };

inline const char* shape_name(Shape s) {
  switch (s) {
    case Shape::kStraight: return "straight";
    case Shape::kDiamond: return "diamond";
    case Shape::kLoop: return "loop";
  }
  return "?";
}

struct GenProgram {
  std::string text;
  Shape shape = Shape::kStraight;
  int commitments = 0;
};

class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  GenProgram next(Shape shape, int commitments) {
    shape_ = shape;
    commitments_ = commitments;
    final_a_ = chance(85);
    GenProgram g;
    g.shape = shape;
    g.commitments = commitments;

    std::string body;
    if (shape == Shape::kDiamond) {
      body += diamond(1, "    ");
    } else if (shape == Shape::kLoop) {
      body += loop(1, "    ");
    }
    body = atoms("    ", pick(0, 2), false) + body + atoms("    ", pick(0, 2), false);
    if (shape != Shape::kStraight && chance(30)) body = atoms("    ", 1, false) + (shape == Shape::kLoop && chance(50) ? loop(1, "    ") : diamond(1, "    ")) + body;

    std::string sends;
    for (int k = 0; k < commitments; ++k) sends += std::string(k ? ", " : " sends ") + "done" + std::to_string(k) + "(int a)";

    std::string t = "module Gen {\n  int hits = 0;\n\n  event main() {\n";
    for (int i = 0; i < 12; ++i) t += "    send go" + std::to_string(i) + "();\n";
    t += "  }\n\n";
    for (int i = 0; i < 12; ++i) {
      const bool c1 = i & 1;
      const bool c2 = (i >> 1) & 1;
      const int n = i / 4;
      t += "  event go" + std::to_string(i) + "() {\n    subject(7, " + (c1 ? "true" : "false") + ", " +
           (c2 ? "true" : "false") + ", " + std::to_string(n) + ");\n  }\n\n";
    }
    t += "  void subject(" + std::string(final_a_ ? "final " : "") + "int a, bool c1, bool c2, int n)" + sends + " {\n" +
         body + "  }\n\n";
    for (int k = 0; k < 2; ++k) {
      const std::string ks = std::to_string(k);
      t += "  event done" + ks + "(int a) {\n    hits = hits + 1;\n  }\n\n";
      t += "  void relay" + ks + "(int a) sends done" + ks + "(int a) {\n    send done" + ks + "(a);\n  }\n\n";
    }
    t += "  void noise(int v) {\n    print \"noise \" + v;\n  }\n}\n";
    g.text = std::move(t);
    return g;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(int percent) { return pick(0, 99) < percent; }

  std::string atom(const std::string& ind, bool in_branch) {
    const int k = pick(0, 1);
    const std::string ks = std::to_string(k);
    switch (pick(0, in_branch ? 11 : 9)) {
      case 0:
      case 1:
      case 2: return ind + "send done" + ks + "(a);\n";
      case 3: return ind + "relay" + ks + "(a);\n";
      case 4: return ind + "noise(n);\n";
      case 5: return ind + "print \"step\";\n";
      case 6: return chance(20) ? ind + "send done" + ks + "(n);\n" : ind + "noise(a);\n";
      case 7: return final_a_ || !chance(40) ? ind + "noise(7);\n" : ind + "a = a + 0;\n";
      case 8:
      case 9: return ind + "print \"pad\";\n";
      case 10: return ind + "return;\n";
      default: return ind + "throw \"boom\";\n";
    }
  }

  // A run of atoms; a return or throw ends the run.
  std::string atoms(const std::string& ind, int n, bool in_branch) {
    std::string out;
    for (int i = 0; i < n; ++i) {
      std::string a = atom(ind, in_branch);
      const bool ends = a.find("return;") != std::string::npos || a.find("throw ") != std::string::npos;
      out += a;
      if (ends) break;
    }
    return out;
  }

  std::string branch_body(int depth, const std::string& ind) {
    std::string out = atoms(ind, pick(0, 2), true);
    if (out.find("return;") != std::string::npos || out.find("throw ") != std::string::npos) return out;
    if (depth < 2 && chance(35)) {
      if (shape_ == Shape::kLoop && chance(50)) out += loop(depth + 1, ind);
      else out += diamond(depth + 1, ind);
    }
    return out;
  }

  std::string diamond(int depth, const std::string& ind) {
    const std::string cond = chance(50) ? "c1" : (chance(50) ? "c2" : "n > 0");
    std::string out = ind + "if (" + cond + ") {\n" + branch_body(depth, ind + "  ") + ind + "}";
    if (chance(75)) out += " else {\n" + branch_body(depth, ind + "  ") + ind + "}";
    return out + "\n";
  }

  std::string loop(int depth, const std::string& ind) {
    std::string out = ind + "while (n > 0) {\n";
    out += atoms(ind + "  ", pick(0, 2), false);
    if (depth < 2 && chance(30)) out += diamond(depth + 1, ind + "  ");
    out += ind + "  n = n - 1;\n" + ind + "}\n";
    return out;
  }

  std::mt19937_64 rng_;
  Shape shape_ = Shape::kStraight;
  int commitments_ = 0;
  bool final_a_ = true;
};

}  // namespace ct
