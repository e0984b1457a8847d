#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ontoq/eval.hpp"
#include "ontoq/graph.hpp"
#include "ontoq/ingestion.hpp"

namespace ontoq {

GenParams GenParams::for_size(std::size_t nodes, std::uint64_t seed) {
  GenParams p;
  p.seed = seed;
  const double n = static_cast<double>(nodes);
  auto at_least = [](double x, std::size_t lo) { return std::max(lo, static_cast<std::size_t>(x)); };
  p.databases = at_least(n * 0.18, 5);
  p.buckets = at_least(n * 0.08, 2);
  p.filler_services = at_least(n * 0.05, 2);
  p.vulnerabilities = at_least(n * 0.04, 12);
  p.subnets = at_least(n / 250.0, 4);
  p.users = at_least(n / 500.0, 5);
  // Compute instances take up the remainder after the fixed scaffolding
  // (tenancies, environments, networks, policies, planted services and NLBs).
  constexpr std::size_t kScaffold = 35;
  const std::size_t others = kScaffold + p.databases + p.buckets + p.filler_services + p.vulnerabilities +
                             p.subnets + p.users;
  p.compute_instances = std::max<std::size_t>(10, nodes > others ? nodes - others : 0);
  return p;
}

namespace {

constexpr std::int64_t kDay = 86400;

const std::array<const char*, 10> kUserNames = {"alice", "bob",   "carol", "dave", "erin",
                                                "frank", "grace", "heidi", "ivan", "judy"};
const std::array<const char*, 8> kVulnDescriptions = {
    "Open SSH Port",           "Unpatched kernel",       "Expired TLS certificate", "Weak cipher suite",
    "Default admin password",  "Outdated OpenSSL build", "Public metadata endpoint", "Missing OS patches"};
const std::array<const char*, 6> kRoles = {"Web frontend", "Batch worker", "API gateway",
                                           "Cache node",   "Build agent",  "Stream processor"};
const std::array<const char*, 4> kEngines = {"PostgreSQL", "MySQL", "Oracle", "MongoDB"};
const std::array<const char*, 5> kApps = {"inventory", "billing", "telemetry", "catalog", "audit logs"};
const std::array<const char*, 4> kPurposes = {"nightly backups", "static web assets", "log archives",
                                              "media uploads"};

struct FillerService {
  const char* label;
  std::vector<std::string> endpoints;
  const char* description;
};

const std::vector<FillerService>& filler_services() {
  static const std::vector<FillerService> v = {
      {"leads", {"/api/leads", "/api/lead-scoring", "/api/schedule-demo"}, "Sales lead tracking"},
      {"promo", {"/api/promotions", "/api/deals", "/api/quotes"}, "Promotion and quote management"},
      {"auth", {"/login", "/oauth/token", "/mfa/verify"}, "Workforce sign-in"},
      {"files", {"/upload", "/download", "/buckets/objects"}, "File transfer gateway"},
      {"insights", {"/reports", "/dashboards", "/metrics"}, "Usage dashboards"},
  };
  return v;
}

class Builder {
 public:
  explicit Builder(std::uint64_t seed) : eng_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
  bool coin(double p) { return static_cast<double>(eng_() >> 11) * 0x1.0p-53 < p; }
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  void node(const std::string& id, const std::string& kind, const std::string& name, PropertyMap props,
            const std::string& description, std::int64_t created_at, std::vector<std::string> endpoints = {}) {
    graph.upsert_node({id, kind, name, std::move(props), description, std::move(endpoints), Timestamp{created_at}});
  }
  void edge(const std::string& src, const std::string& rel, const std::string& dst) {
    graph.add_edge({src, dst, rel, {}});
  }

  // Costs are unique so "top N" answers are unambiguous.
  double cost(double lo, double hi) {
    const double whole = static_cast<double>(between(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
    const std::uint64_t n = ++cost_counter_;
    return whole + static_cast<double>(n % 100) / 100.0 + static_cast<double>(n / 100) / 1e4;
  }

  KnowledgeGraph graph;

 private:
  std::mt19937_64 eng_;
  std::uint64_t cost_counter_ = 0;
};

std::string numbered(const char* prefix, std::size_t i, int width = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%0*zu", prefix, width, i);
  return buf;
}

struct Costed {
  std::string id;
  std::string kind;
  double cost;
};

std::vector<std::string> top_ids(std::vector<Costed> v, std::size_t n, const std::string& kind = "") {
  if (!kind.empty()) v.erase(std::remove_if(v.begin(), v.end(), [&](const Costed& c) { return c.kind != kind; }), v.end());
  std::sort(v.begin(), v.end(), [](const Costed& a, const Costed& b) { return a.cost > b.cost; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, v.size()); ++i) out.push_back(v[i].id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> sorted(std::set<std::string> s) { return {s.begin(), s.end()}; }

}  // namespace

GeneratedCorpus generate_corpus(const GenParams& p) {
  Builder b(p.seed);
  const std::int64_t now = p.now;
  const std::int64_t epoch = now - 400 * kDay;

  b.node("tenancy-prod", "Tenancy", "acme-production", {}, "Production tenancy", epoch);
  b.node("tenancy-dev", "Tenancy", "acme-development", {}, "Development tenancy", epoch);
  const std::array<std::pair<const char*, const char*>, 3> envs = {
      {{"env-production", "Production"}, {"env-staging", "Staging"}, {"env-development", "Development"}}};
  for (const auto& [id, name] : envs) b.node(id, "Environment", name, {}, std::string(name) + " environment", epoch);
  b.node("vcn-prod", "VCN", "prod-vcn", {{"cidr", std::string("10.0.0.0/16")}}, "Production network", epoch);
  b.node("vcn-dev", "VCN", "dev-vcn", {{"cidr", std::string("10.1.0.0/16")}}, "Development network", epoch);
  std::vector<std::string> subnets;
  for (std::size_t i = 0; i < p.subnets; ++i) {
    subnets.push_back(numbered("subnet", i + 1, 3));
    b.node(subnets.back(), "Subnet", subnets.back(), {}, "Application subnet", epoch);
    b.edge(subnets.back(), "IN_VCN", i % 2 ? "vcn-dev" : "vcn-prod");
  }
  std::vector<std::string> users;
  for (std::size_t i = 0; i < p.users; ++i) {
    const std::string name = i < kUserNames.size() ? kUserNames[i] : numbered("user", i + 1, 3);
    users.push_back("user-" + name);
    b.node(users.back(), "User", name, {}, "Cloud engineer", epoch);
  }
  b.node("policy-pci", "CompliancePolicy", "PCI", {}, "Payment Card Industry Data Security Standard", epoch);
  b.node("policy-hipaa", "CompliancePolicy", "HIPAA", {}, "Health data privacy rule", epoch);
  std::vector<std::string> vulns;
  for (std::size_t i = 0; i < p.vulnerabilities; ++i) {
    vulns.push_back(numbered("vuln", i + 1, 3));
    b.node(vulns.back(), "Vulnerability", numbered("cve-2025", 1000 + i), {{"severity", std::string(i % 3 ? "medium" : "high")}},
           kVulnDescriptions[i % kVulnDescriptions.size()], now - b.between(1, 200) * kDay);
  }

  std::vector<Costed> costed;
  std::map<std::string, std::string> env_of;
  std::map<std::string, std::set<std::string>> vulns_of;
  struct Authored {
    std::string id;
    std::string kind;
    std::string user;
    std::int64_t created_at;
  };
  std::vector<Authored> authored;

  auto place = [&](const std::string& id, const std::string& kind, double vuln_rate) {
    const std::string env = envs[b.below(envs.size())].first;
    env_of[id] = env;
    b.edge(id, "DEPLOYED_IN", env);
    if (b.coin(vuln_rate)) {
      const std::size_t n = 1 + b.below(2);
      for (std::size_t k = 0; k < n; ++k) {
        const std::string& v = vulns[b.below(vulns.size())];
        if (vulns_of[id].insert(v).second) b.edge(id, "HAS_VULNERABILITY", v);
      }
    }
    (void)kind;
  };

  // Compute instances. The first few are pinned recent creations by the
  // first user so the temporal gold set is never empty.
  std::vector<std::string> instances;
  for (std::size_t i = 0; i < p.compute_instances; ++i) {
    const std::string id = numbered("ci", i + 1);
    instances.push_back(id);
    std::size_t user = b.below(users.size());
    std::int64_t created = now - b.between(1, 180) * kDay - b.between(0, kDay - 1);
    if (i < 2) {
      user = 0;
      created = now - static_cast<std::int64_t>(3 + 4 * i) * kDay;
    }
    const double c = b.cost(20, 900);
    std::string desc = kRoles[b.below(kRoles.size())];
    desc += " host";
    if (b.coin(0.15)) desc += " hardened by the security team";
    b.node(id, "ComputeInstance", numbered("host", i + 1), {{"shape", std::string(i % 3 ? "VM.Standard3" : "VM.Optimized")},
                                                            {"cost", c}, {"state", std::string("running")}},
           desc, created);
    costed.push_back({id, "ComputeInstance", c});
    authored.push_back({id, "ComputeInstance", users[user], created});
    place(id, "ComputeInstance", 0.25);
    if (env_of[id] != "env-production" && b.coin(0.3)) {
      auto* n = b.graph.find_node(id);
      ResourceNode copy = *n;
      copy.description += ", cloned from production";
      b.graph.upsert_node(copy);
    }
    b.edge(id, "IN_SUBNET", subnets[b.below(subnets.size())]);
    b.edge(id, "CREATED_BY", users[user]);
  }

  for (std::size_t i = 0; i < p.databases; ++i) {
    const std::string id = numbered("db", i + 1);
    std::size_t user = b.below(users.size());
    std::int64_t created = now - b.between(1, 180) * kDay;
    if (i == 0) {
      user = std::min<std::size_t>(1, users.size() - 1);
      created = now - 5 * kDay;
    }
    const double c = b.cost(50, 1500);
    b.node(id, "Database", numbered("db", i + 1), {{"engine", std::string(kEngines[b.below(kEngines.size())])}, {"cost", c}},
           std::string(kEngines[b.below(kEngines.size())]) + " database for " + kApps[b.below(kApps.size())], created);
    costed.push_back({id, "Database", c});
    authored.push_back({id, "Database", users[user], created});
    place(id, "Database", 0.2);
    b.edge(id, "CREATED_BY", users[user]);
    if (b.coin(0.3)) b.edge(id, "HOSTED_ON", instances[b.below(instances.size())]);
  }

  for (std::size_t i = 0; i < p.buckets; ++i) {
    const std::string id = numbered("bucket", i + 1);
    const double c = b.cost(5, 300);
    b.node(id, "StorageBucket", id, {{"cost", c}, {"public", b.coin(0.2)}},
           std::string("Object storage for ") + kPurposes[b.below(kPurposes.size())], now - b.between(1, 300) * kDay);
    costed.push_back({id, "StorageBucket", c});
    place(id, "StorageBucket", 0.1);
    if (b.coin(0.2)) b.edge(id, "SUBJECT_TO", "policy-hipaa");
  }

  // Services.
  auto service = [&](const std::string& id, const std::string& name, const std::string& desc,
                     std::vector<std::string> endpoints, const char* tenancy) {
    b.node(id, "Service", name, {}, desc, now - b.between(30, 300) * kDay, std::move(endpoints));
    b.edge(id, "DEPLOYED_IN", tenancy);
    b.edge(id, "HOSTED_ON", instances[b.below(instances.size())]);
  };
  std::set<std::string> pci_payment;
  for (std::size_t i = 0; i < 9; ++i) {
    const std::string id = numbered("svc-pay", i + 1, 2);
    service(id, numbered("payments", i + 1, 2), "Storefront payment processing; handles financial transactions",
            {"/api/orders", "/api/checkout", "/api/payments", "/api/catalog"}, "tenancy-prod");
    b.edge(id, "SUBJECT_TO", "policy-pci");
    pci_payment.insert(id);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string id = numbered("svc-finrep", i + 1, 2);
    service(id, numbered("finance-reports", i + 1, 2),
            "Reports on financial transactions for the finance team; PCI compliant audit pending",
            {"/reports/revenue", "/dashboards/finance", "/metrics"}, "tenancy-prod");
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string id = numbered("svc-shop", i + 1, 2);
    service(id, numbered("shop", i + 1, 2), "Regional storefront",
            {"/api/cart", "/api/orders", "/api/products", "/api/shipping", "/api/checkout"}, "tenancy-dev");
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string id = numbered("svc-cardauth", i + 1, 2);
    service(id, numbered("card-login", i + 1, 2), "Cardholder sign-in", {"/login", "/oauth/token", "/mfa"},
            "tenancy-prod");
    b.edge(id, "SUBJECT_TO", "policy-pci");
  }
  for (std::size_t i = 0; i < p.filler_services; ++i) {
    const auto& f = filler_services()[i % filler_services().size()];
    const std::string id = numbered("svc", i + 1);
    service(id, std::string(f.label) + "-" + std::to_string(i + 1), f.description, f.endpoints,
            b.coin(0.5) ? "tenancy-prod" : "tenancy-dev");
  }
  service("svc-crm", "crm", "Customer relationship management", {"/api/leads", "/api/opportunities", "/api/quotes"},
          "tenancy-prod");
  service("svc-crm-dev", "crm", "Customer relationship management (development copy)",
          {"/api/leads", "/api/opportunities"}, "tenancy-dev");

  // Load balancers.
  auto nlb = [&](const std::string& id, const std::string& fronted, const char* tenancy) {
    b.node(id, "NLB", id, {{"listeners", std::string("443")}}, "Network load balancer", now - b.between(30, 300) * kDay);
    b.edge(id, "DEPLOYED_IN", tenancy);
    b.edge(id, "IN_SUBNET", subnets[b.below(subnets.size())]);
    b.edge(fronted, "FRONTED_BY", id);
  };
  nlb("nlb-crm-a", "svc-crm", "tenancy-prod");
  nlb("nlb-crm-b", "svc-crm", "tenancy-prod");
  nlb("nlb-crm-dev", "svc-crm-dev", "tenancy-dev");
  for (std::size_t i = 0; i < 3; ++i) nlb(numbered("nlb-shop", i + 1, 2), numbered("svc-shop", i + 1, 2), "tenancy-dev");

  // Gold answers from the construction records.
  GeneratedCorpus out;
  auto gold = [&](const std::string& q, std::vector<std::string> ids, const char* archetype) {
    out.gold.push_back({q, std::move(ids), archetype, now});
  };
  gold("What are the top 10 expensive resources in my cloud environment?", top_ids(costed, 10), "cost");
  gold("top 5 most expensive databases", top_ids(costed, 5, "Database"), "cost");
  gold("Which services handle financial transactions and are PCI compliant?", sorted(pci_payment), "compliance");
  gold("List all PCI-compliant services handling financial transactions.", sorted(pci_payment), "compliance");

  auto recent_by = [&](const std::string& kind, const std::string& user, std::int64_t days) {
    std::set<std::string> s;
    for (const auto& a : authored)
      if (a.kind == kind && a.user == user && a.created_at >= now - days * kDay && a.created_at <= now) s.insert(a.id);
    return sorted(s);
  };
  const std::string first_user = users[0].substr(5);
  const std::string second_user = users[std::min<std::size_t>(1, users.size() - 1)].substr(5);
  gold("List all compute instances created in the last two weeks by user " + first_user,
       recent_by("ComputeInstance", users[0], 14), "temporal");
  gold("databases created in the last 30 days by user " + second_user,
       recent_by("Database", users[std::min<std::size_t>(1, users.size() - 1)], 30), "temporal");

  std::set<std::string> prod_vulnerable, prod_vulnerable_ci;
  for (const auto& [id, vs] : vulns_of) {
    if (vs.empty() || env_of[id] != "env-production") continue;
    prod_vulnerable.insert(id);
    if (b.graph.find_node(id)->kind == "ComputeInstance") prod_vulnerable_ci.insert(id);
  }
  gold("Find all resources in production that have security vulnerabilities", sorted(prod_vulnerable), "security");
  gold("List all compute instances in the production environment that have security vulnerabilities.",
       sorted(prod_vulnerable_ci), "security");
  gold("list the NLB that fronts the CRM service in my production tenancy", {"nlb-crm-a", "nlb-crm-b"}, "topology");
  gold("load balancers in front of the crm service", {"nlb-crm-a", "nlb-crm-b", "nlb-crm-dev"}, "topology");

  std::ostringstream corpus;
  write_corpus(b.graph, corpus);
  out.corpus = corpus.str();
  out.nodes = b.graph.node_count();
  out.edges = b.graph.edge_count();
  return out;
}

}  // namespace ontoq
