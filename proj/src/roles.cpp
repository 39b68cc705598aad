#include "probagen/roles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace probagen {

namespace {

// Similarities this close to the threshold count as reaching it.
constexpr double kCosineSlack = 1e-12;

std::size_t most_frequent(const std::map<std::size_t, std::size_t>& votes) {
  std::size_t best = votes.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [role, count] : votes)
    if (count > best_count) {
      best = role;
      best_count = count;
    }
  return best;
}

}  // namespace

double cosine_similarity(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

RoleAssignment discover_roles(const EventLog& log, double threshold) {
  std::map<std::string, std::map<std::string, double>> originators;
  for (const auto& t : log.traces())
    for (const auto& e : t.events)
      if (e.resource) originators[e.activity][*e.resource] += 1.0;

  struct Group {
    std::vector<std::string> activities;
    std::map<std::string, double> vector;
  };
  std::vector<Group> groups;
  for (auto& [activity, vec] : originators) groups.push_back({{activity}, std::move(vec)});

  while (groups.size() > 1) {
    double best = -1.0;
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        const double s = cosine_similarity(groups[i].vector, groups[j].vector);
        if (s > best + kCosineSlack) {
          best = s;
          bi = i;
          bj = j;
        }
      }
    if (best + kCosineSlack < threshold) break;
    for (const auto& [r, c] : groups[bj].vector) groups[bi].vector[r] += c;
    groups[bi].activities.insert(groups[bi].activities.end(), groups[bj].activities.begin(),
                                 groups[bj].activities.end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  RoleAssignment out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    RoleAssignment::Role role;
    role.name = "role_" + std::to_string(g + 1);
    role.activities = groups[g].activities;
    std::sort(role.activities.begin(), role.activities.end());
    for (const auto& a : role.activities) out.activity_role[a] = g;
    out.roles.push_back(std::move(role));
  }

  std::set<std::string> resources;
  for (const auto& g : groups)
    for (const auto& [r, c] : g.vector) resources.insert(r);
  for (const auto& r : resources) {
    std::size_t best = 0;
    double best_count = -1.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto it = groups[g].vector.find(r);
      const double c = it == groups[g].vector.end() ? 0.0 : it->second;
      if (c > best_count) {
        best = g;
        best_count = c;
      }
    }
    out.resource_role[r] = best;
    out.roles[best].resources.push_back(r);
  }
  return out;
}

std::map<std::string, std::size_t> map_resources_to_roles(const EventLog& log, const RoleAssignment& roles,
                                                          std::vector<std::string>* unmapped) {
  std::map<std::string, std::map<std::size_t, std::size_t>> votes;
  std::set<std::string> seen;
  for (const auto& t : log.traces())
    for (const auto& e : t.events) {
      if (!e.resource) continue;
      seen.insert(*e.resource);
      if (auto it = roles.activity_role.find(e.activity); it != roles.activity_role.end())
        ++votes[*e.resource][it->second];
    }
  std::map<std::string, std::size_t> out;
  for (const auto& r : seen) {
    if (auto v = votes.find(r); v != votes.end()) {
      out[r] = most_frequent(v->second);
    } else if (auto it = roles.resource_role.find(r); it != roles.resource_role.end()) {
      out[r] = it->second;
    } else if (unmapped) {
      unmapped->push_back(r);
    }
  }
  return out;
}

}  // namespace probagen
