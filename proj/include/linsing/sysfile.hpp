#pragma once

#include <optional>
#include <string>

#include "linsing/smooth_map.hpp"
#include "linsing/system.hpp"

namespace linsing {

// Plain-text description: one `key = value` per line, '#' starts a
// comment. Matrices use ',' between entries and ';' between rows; vectors
// are ';'-separated. Required keys: n, m, A, b. Optional: name, labels.
SingularSystem parse_system_text(const std::string& text);
SingularSystem load_system(const std::string& path);

std::string system_to_text(const SingularSystem& sys);
void save_system(const std::string& path, const SingularSystem& sys);

// Objects offered for symmetry checking, same file format. Recognized
// keys: phi, phi_inv, Phi, V, B, h. A supplied phi must come with its
// inverse; the pair is spot-checked on a sample box at load time.
struct CandidateSet {
  std::optional<SmoothMap> phi, phi_inv, Phi, V, B, h;
};

CandidateSet parse_candidates_text(const std::string& text, int n, int m);
CandidateSet load_candidates(const std::string& path, int n, int m);

// || phi_inv(phi(x)) - x || over seeded samples in [-1, 1]^n
void check_inverse_pair(const SmoothMap& phi, const SmoothMap& phi_inv,
                        int samples = 20, double tol = 1e-8);

}  // namespace linsing
