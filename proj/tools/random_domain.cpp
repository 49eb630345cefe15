// random_domain: print a seeded random relational MDP over p/1 and q/2.

#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"

namespace {

class Generator {
public:
  explicit Generator(unsigned seed) : seed_(seed), rng_(seed) {}

  std::string domain() {
    std::ostringstream o;
    o << "; Random domain over p/1 and q/2 (seed " << seed_ << ").\n(domain random2\n";
    o << "  (predicates (p 1) (q 2))\n";
    o << "  (discount " << pick({"0.8", "0.9"}) << ")\n";
    o << "  (reward " << reward() << ")\n";
    o << "  (action set\n    (params u*)\n";
    o << "    (alternative setS\n      (tvd p (X) (if (= X u*) " << effect("(q u* u*)") << " (if (p X) 1 0))))\n";
    o << "    (alternative setF)\n";
    prob_pair(o, "setS", "setF", "(p u*)");
    o << "  )\n";
    o << "  (action link\n    (params u* w*)\n";
    o << "    (alternative linkS\n";
    o << "      (tvd q (X Y) (if (= X u*) (if (= Y w*) " << effect("(p w*)")
      << " (if (q X Y) 1 0)) (if (q X Y) 1 0))))\n";
    o << "    (alternative linkF\n";
    o << "      (tvd p (X) (if (= X w*) " << effect("(q u* w*)") << " (if (p X) 1 0))))\n";
    prob_pair(o, "linkS", "linkF", "(q w* u*)");
    o << "  ))\n";
    return o.str();
  }

private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string pick(std::initializer_list<const char*> options) {
    auto it = options.begin();
    std::advance(it, uniform(0, static_cast<int>(options.size()) - 1));
    return *it;
  }

  std::string leaf() { return std::to_string(uniform(0, 9)); }

  std::string reward() {
    std::string inner = "(if " + pick({"(q x y)", "(q y x)", "(q x x)"}) + " " + leaf() + " " + leaf() + ")";
    return "(if (p x) " + (uniform(0, 1) ? inner : leaf()) + " " + (uniform(0, 1) ? leaf() : inner) + ")";
  }

  // New truth value of an affected atom.
  std::string effect(const std::string& guard) {
    switch (uniform(0, 2)) {
      case 0: return "1";
      case 1: return "0";
      default: return "(if " + guard + " 1 0)";
    }
  }

  void prob_pair(std::ostringstream& o, const std::string& s, const std::string& f, const std::string& guard) {
    int a = uniform(1, 9), b = uniform(1, 9);
    if (uniform(0, 1)) {
      o << "    (prob " << s << " (if " << guard << " 0." << a << " 0." << b << "))\n";
      o << "    (prob " << f << " (if " << guard << " 0." << 10 - a << " 0." << 10 - b << "))\n";
    } else {
      o << "    (prob " << s << " 0." << a << ")\n";
      o << "    (prob " << f << " 0." << 10 - a << ")\n";
    }
  }

  unsigned seed_;
  std::mt19937 rng_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random relational MDP generator"};
  unsigned seed = 1;
  app.add_option("--seed", seed, "Random seed");
  CLI11_PARSE(app, argc, argv);
  std::fputs(Generator(seed).domain().c_str(), stdout);
  return 0;
}
