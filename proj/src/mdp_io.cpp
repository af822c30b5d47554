#include "lpo/mdp_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lpo {
namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

MdpFile load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MDP file: " + path);

  MdpFile out;
  Mdp& m = out.mdp;
  std::string section;
  std::string raw;
  int lineno = 0;
  bool meta_done = false;
  struct Pending {
    std::string line;
    int lineno;
  };
  std::vector<Pending> rewards, transitions, features;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(path, lineno, "malformed section header");
      section = line.substr(1, line.size() - 2);
      if (section != "meta" && section != "reward" && section != "transition" && section != "features")
        fail(path, lineno, "unknown section [" + section + "]");
      continue;
    }
    if (section == "meta") {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(path, lineno, "expected key = value");
      const std::string key = strip(line.substr(0, eq));
      const std::string val = strip(line.substr(eq + 1));
      try {
        if (key == "n_states") m.n_states = std::stoi(val);
        else if (key == "n_actions") m.n_actions = std::stoi(val);
        else if (key == "gamma") m.gamma = std::stod(val);
        else if (key == "initial_state") m.initial_state = std::stoi(val);
        else fail(path, lineno, "unknown meta key '" + key + "'");
      } catch (const std::invalid_argument&) {
        fail(path, lineno, "malformed value for '" + key + "'");
      }
      meta_done = m.n_states > 0 && m.n_actions > 0;
      continue;
    }
    if (section == "reward") rewards.push_back({line, lineno});
    else if (section == "transition") transitions.push_back({line, lineno});
    else if (section == "features") features.push_back({line, lineno});
    else fail(path, lineno, "data line outside any section");
  }
  if (!meta_done) throw std::runtime_error(path + ": missing or incomplete [meta] section");

  m.reward.assign(static_cast<std::size_t>(m.n_pairs()), 0.0);
  m.transition.assign(static_cast<std::size_t>(m.n_pairs()) * m.n_states, 0.0);

  auto check_pair = [&](int s, int a, int at) {
    if (s < 0 || s >= m.n_states || a < 0 || a >= m.n_actions) fail(path, at, "pair index out of range");
  };

  for (const auto& p : rewards) {
    std::istringstream ls(p.line);
    int s, a;
    double r;
    if (!(ls >> s >> a >> r)) fail(path, p.lineno, "expected 's a r'");
    check_pair(s, a, p.lineno);
    m.reward[m.pair_index(s, a)] = r;
  }
  for (const auto& p : transitions) {
    std::istringstream ls(p.line);
    int s, a, s2;
    double prob;
    if (!(ls >> s >> a >> s2 >> prob)) fail(path, p.lineno, "expected 's a s2 p'");
    check_pair(s, a, p.lineno);
    if (s2 < 0 || s2 >= m.n_states) fail(path, p.lineno, "successor state out of range");
    m.transition[static_cast<std::size_t>(m.pair_index(s, a)) * m.n_states + s2] += prob;
  }
  for (const auto& p : features) {
    std::istringstream ls(p.line);
    std::string head;
    ls >> head;
    int s, a;
    if (head == "feature") {
      if (!(ls >> s >> a)) fail(path, p.lineno, "expected 'feature s a v1 ...'");
    } else {
      try {
        s = std::stoi(head);
      } catch (const std::invalid_argument&) {
        fail(path, p.lineno, "expected 'feature s a v1 ...'");
      }
      if (!(ls >> a)) fail(path, p.lineno, "expected 'feature s a v1 ...'");
    }
    check_pair(s, a, p.lineno);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (v.empty()) fail(path, p.lineno, "feature line carries no components");
    if (out.d_feat == 0) {
      out.d_feat = static_cast<int>(v.size());
      out.features.assign(static_cast<std::size_t>(m.n_pairs()) * out.d_feat, 0.0);
    } else if (static_cast<int>(v.size()) != out.d_feat) {
      fail(path, p.lineno, "inconsistent feature dimension");
    }
    for (int j = 0; j < out.d_feat; ++j)
      out.features[static_cast<std::size_t>(m.pair_index(s, a)) * out.d_feat + j] = v[j];
  }

  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return out;
}

void save_mdp(const std::string& path, const Mdp& mdp, int d_feat,
              const std::vector<double>& features) {
  mdp.validate();
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write MDP file: " + path);
  outf.precision(17);
  outf << "[meta]\n";
  outf << "n_states = " << mdp.n_states << "\n";
  outf << "n_actions = " << mdp.n_actions << "\n";
  outf << "gamma = " << mdp.gamma << "\n";
  outf << "initial_state = " << mdp.initial_state << "\n";
  outf << "[reward]\n";
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a)
      if (mdp.r(s, a) != 0.0) outf << s << " " << a << " " << mdp.r(s, a) << "\n";
  outf << "[transition]\n";
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double* p = mdp.row(s, a);
      for (int s2 = 0; s2 < mdp.n_states; ++s2)
        if (p[s2] != 0.0) outf << s << " " << a << " " << s2 << " " << p[s2] << "\n";
    }
  }
  if (d_feat > 0) {
    outf << "[features]\n";
    for (int s = 0; s < mdp.n_states; ++s) {
      for (int a = 0; a < mdp.n_actions; ++a) {
        outf << "feature " << s << " " << a;
        for (int j = 0; j < d_feat; ++j)
          outf << " " << features[static_cast<std::size_t>(mdp.pair_index(s, a)) * d_feat + j];
        outf << "\n";
      }
    }
  }
  if (!outf) throw std::runtime_error("write failed: " + path);
}

}  // namespace lpo
