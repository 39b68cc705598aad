#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "probagen/log_model.hpp"

namespace probagen {

inline constexpr double kDefaultRoleThreshold = 0.7;

/// Partition of resources into roles, plus which role performs each activity.
struct RoleAssignment {
  struct Role {
    std::string name;
    std::vector<std::string> activities;
    std::vector<std::string> resources;
  };
  std::vector<Role> roles;
  std::map<std::string, std::size_t> activity_role;
  std::map<std::string, std::size_t> resource_role;
};

/// Agglomerative role discovery: one role per activity with its originator
/// count vector, then repeatedly merge the most cosine-similar pair (lowest
/// indices on ties) while the similarity is at least `threshold`. Each
/// resource joins the role where it occurs most often.
RoleAssignment discover_roles(const EventLog& log, double threshold = kDefaultRoleThreshold);

double cosine_similarity(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

/// Role of every resource in `log`: the role its events most often belong to
/// through `activity_role`, else its role in `roles.resource_role`. Resources
/// with neither are left out and named in `unmapped`.
std::map<std::string, std::size_t> map_resources_to_roles(const EventLog& log, const RoleAssignment& roles,
                                                          std::vector<std::string>* unmapped = nullptr);

}  // namespace probagen
