#include "ontoq/taxonomy.hpp"

#include "ontoq/errors.hpp"

namespace ontoq {

Taxonomy Taxonomy::seeded() {
  Taxonomy t;
  for (const char* kind :
       {"ComputeInstance", "Database", "StorageBucket", "Service", "NLB", "Firewall", "Subnet", "VCN",
        "InternetGateway", "Environment", "Tenancy", "Vulnerability", "CompliancePolicy", "User"}) {
    t.register_kind(kind);
  }

  const std::set<std::string> resources = {"ComputeInstance", "Database", "StorageBucket", "Service",
                                           "NLB",             "Firewall", "Subnet",        "VCN",
                                           "InternetGateway"};
  std::set<std::string> deployable = resources;
  deployable.insert("Environment");

  t.register_relation({"DEPENDS_ON", {"Service", "ComputeInstance"}, {"Database", "Service", "StorageBucket"}});
  t.register_relation(
      {"COMMUNICATES_WITH", {"Service", "ComputeInstance"}, {"Service", "ComputeInstance", "Database"}});
  t.register_relation(
      {"SECURED_BY", {"ComputeInstance", "Subnet", "NLB", "Service", "Database", "VCN"}, {"Firewall"}});
  t.register_relation({"DEPLOYED_IN", deployable, {"Environment", "Tenancy"}});
  t.register_relation(
      {"HAS_VULNERABILITY", {"ComputeInstance", "Database", "Service", "StorageBucket", "NLB"}, {"Vulnerability"}});
  t.register_relation({"HOSTED_ON", {"Service", "Database"}, {"ComputeInstance"}});
  t.register_relation({"FRONTED_BY", {"Service", "ComputeInstance"}, {"NLB"}});
  t.register_relation({"IN_SUBNET", {"ComputeInstance", "NLB", "Database"}, {"Subnet"}});
  t.register_relation({"IN_VCN", {"Subnet", "InternetGateway", "Firewall"}, {"VCN"}});
  t.register_relation(
      {"SUBJECT_TO", {"Service", "Database", "StorageBucket", "ComputeInstance"}, {"CompliancePolicy"}});
  t.register_relation({"CREATED_BY", resources, {"User"}});

  t.set_preferred_route("Environment", "DEPLOYED_IN");
  t.set_preferred_route("Tenancy", "DEPLOYED_IN");
  t.set_preferred_route("Vulnerability", "HAS_VULNERABILITY");
  t.set_preferred_route("CompliancePolicy", "SUBJECT_TO");
  t.set_preferred_route("User", "CREATED_BY");
  t.set_preferred_route("Subnet", "IN_SUBNET");
  t.set_preferred_route("VCN", "IN_VCN");
  t.set_preferred_route("NLB", "FRONTED_BY");
  t.set_preferred_route("Firewall", "SECURED_BY");
  return t;
}

void Taxonomy::register_kind(const std::string& kind) {
  if (kind.empty()) throw InvalidNode("node kind must be non-empty");
  kinds_.insert(kind);
}

void Taxonomy::register_relation(RelationSpec spec) {
  if (spec.name.empty()) throw InvalidNode("relationship type must be non-empty");
  auto it = relation_index_.find(spec.name);
  if (it != relation_index_.end()) {
    relations_[it->second] = std::move(spec);
    return;
  }
  relation_index_.emplace(spec.name, relations_.size());
  relations_.push_back(std::move(spec));
}

void Taxonomy::set_preferred_route(const std::string& target_kind, const std::string& rel_type) {
  if (!has_relation(rel_type)) throw UnknownRelType(rel_type);
  preferred_routes_[target_kind] = rel_type;
}

const RelationSpec* Taxonomy::relation(const std::string& rel) const {
  auto it = relation_index_.find(rel);
  return it == relation_index_.end() ? nullptr : &relations_[it->second];
}

Link Taxonomy::orient(const std::string& rel_type, const std::optional<std::string>& anchor_kind,
                      const std::string& target_kind) const {
  const RelationSpec* spec = relation(rel_type);
  if (spec == nullptr) throw UnknownRelType(rel_type);
  const bool target_is_dst = spec->target_kinds.count(target_kind) > 0;
  const bool target_is_src = spec->source_kinds.count(target_kind) > 0;
  if (anchor_kind) {
    if (target_is_dst && spec->source_kinds.count(*anchor_kind)) return {rel_type, true, false};
    if (target_is_src && spec->target_kinds.count(*anchor_kind)) return {rel_type, false, false};
    return {rel_type, true, true};
  }
  if (target_is_dst && !target_is_src) return {rel_type, true, false};
  if (target_is_src && !target_is_dst) return {rel_type, false, false};
  return {rel_type, true, true};
}

std::optional<Link> Taxonomy::link_between(const std::optional<std::string>& anchor_kind,
                                           const std::string& target_kind) const {
  if (auto it = preferred_routes_.find(target_kind); it != preferred_routes_.end()) {
    Link l = orient(it->second, anchor_kind, target_kind);
    if (!l.either || !anchor_kind) return l;
  }
  for (const auto& spec : relations_) {
    Link l = orient(spec.name, anchor_kind, target_kind);
    if (!l.either) return l;
  }
  return std::nullopt;
}

}  // namespace ontoq
