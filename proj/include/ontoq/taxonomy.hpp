#pragma once

// The ontology: registered node kinds and relationship types.
//
// Each relationship type is stored in one canonical direction. The table
// below lists the kinds each type is expected to connect (source -> target);
// it drives how the query compiler orients edge patterns and is not enforced
// on stored edges.
//
//   DEPENDS_ON         Service, ComputeInstance      -> Database, Service, StorageBucket
//   COMMUNICATES_WITH  Service, ComputeInstance      -> Service, ComputeInstance, Database
//   SECURED_BY         most infrastructure kinds     -> Firewall
//   DEPLOYED_IN        resources, Environment        -> Environment, Tenancy
//   HAS_VULNERABILITY  ComputeInstance, Database, .. -> Vulnerability
//   HOSTED_ON          Service, Database             -> ComputeInstance
//   FRONTED_BY         Service, ComputeInstance      -> NLB
//   IN_SUBNET          ComputeInstance, NLB, Database-> Subnet
//   IN_VCN             Subnet, InternetGateway, ..   -> VCN
//   SUBJECT_TO         Service, Database, ..         -> CompliancePolicy
//   CREATED_BY         any resource                  -> User

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ontoq {

struct RelationSpec {
  std::string name;
  std::set<std::string> source_kinds;
  std::set<std::string> target_kinds;
};

/// A relationship type oriented relative to an anchor: `forward` means the
/// stored edge points from the anchor to the other node.
struct Link {
  std::string rel_type;
  bool forward = true;
  bool either = false;
};

class Taxonomy {
 public:
  /// Taxonomy seeded with the cloud-resource kinds and relationship types.
  static Taxonomy seeded();

  void register_kind(const std::string& kind);
  void register_relation(RelationSpec spec);
  /// Preferred relationship for reaching a condition of kind `target`.
  void set_preferred_route(const std::string& target_kind, const std::string& rel_type);

  bool has_kind(const std::string& kind) const { return kinds_.count(kind) > 0; }
  bool has_relation(const std::string& rel) const { return relation_index_.count(rel) > 0; }
  const std::set<std::string>& kinds() const { return kinds_; }
  const std::vector<RelationSpec>& relations() const { return relations_; }
  const RelationSpec* relation(const std::string& rel) const;

  /// Orients `rel_type` between an anchor (nullopt for an unlabeled anchor)
  /// and a target kind.
  Link orient(const std::string& rel_type, const std::optional<std::string>& anchor_kind,
              const std::string& target_kind) const;

  /// Relationship connecting an anchor to a node of `target_kind`: the
  /// preferred route when one is registered, otherwise the first relation
  /// whose canonical kinds fit in either direction.
  std::optional<Link> link_between(const std::optional<std::string>& anchor_kind,
                                   const std::string& target_kind) const;

 private:
  std::set<std::string> kinds_;
  std::vector<RelationSpec> relations_;
  std::map<std::string, std::size_t> relation_index_;
  std::map<std::string, std::string> preferred_routes_;
};

}  // namespace ontoq
