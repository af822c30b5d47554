#pragma once

#include <string>
#include <vector>

#include "lpo/mdp.hpp"

namespace lpo {

// On-disk MDP description. Sections: [meta] with n_states, n_actions, gamma,
// initial_state as key = value lines; [reward] lines "s a r"; [transition]
// lines "s a s2 p"; optional [features] lines "feature s a v1 ... v_d" for
// linear function classes. '#' starts a comment. Unlisted rewards default to
// 0; transition rows must be fully specified.
struct MdpFile {
  Mdp mdp;
  int d_feat = 0;                 // 0 when the file carries no features
  std::vector<double> features;   // [pair * d_feat + j]
};

MdpFile load_mdp(const std::string& path);
void save_mdp(const std::string& path, const Mdp& mdp, int d_feat = 0,
              const std::vector<double>& features = {});

}  // namespace lpo
