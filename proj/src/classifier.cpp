#include "ontoq/classifier.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ontoq/errors.hpp"
#include "ontoq/ingestion.hpp"

namespace ontoq {

namespace {

constexpr std::array<const char*, 5> kCategoryOrder = {"ecommerce", "sales", "identity", "storage", "analytics"};

std::size_t rank_of(const std::string& label) {
  for (std::size_t i = 0; i < kCategoryOrder.size(); ++i)
    if (label == kCategoryOrder[i]) return i;
  return kCategoryOrder.size();
}

bool ends_with(const std::string& s, const char* suffix) {
  const std::string_view sv(suffix);
  return s.size() >= sv.size() && s.compare(s.size() - sv.size(), sv.size(), sv) == 0;
}

std::string stem(std::string w) {
  if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  if (ends_with(w, "ing") && w.size() > 5) return w.substr(0, w.size() - 3);
  if (ends_with(w, "es") && w.size() > 4 &&
      (ends_with(w, "ses") || ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes")))
    return w.substr(0, w.size() - 2);
  if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 3) return w.substr(0, w.size() - 1);
  return w;
}

std::vector<std::string> raw_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> stems(const std::string& text) {
  auto w = raw_words(text);
  for (auto& x : w) x = stem(x);
  return w;
}

bool term_matches(const std::vector<std::string>& term_stems, const std::string& glued,
                  const std::vector<std::vector<std::string>>& segments) {
  if (term_stems.empty()) return false;
  for (const auto& seg : segments) {
    if (std::search(seg.begin(), seg.end(), term_stems.begin(), term_stems.end()) != seg.end()) return true;
    if (term_stems.size() > 1 && std::find(seg.begin(), seg.end(), glued) != seg.end()) return true;
  }
  return false;
}

}  // namespace

CategoryLexicon::CategoryLexicon(std::vector<Category> categories) : categories_(std::move(categories)) {
  std::stable_sort(categories_.begin(), categories_.end(), [](const Category& a, const Category& b) {
    const auto ra = rank_of(a.label), rb = rank_of(b.label);
    if (ra != rb) return ra < rb;
    return a.label < b.label;
  });
}

CategoryLexicon CategoryLexicon::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(std::string("category lexicon is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfig("category lexicon must map category -> list of {term, weight}");
  std::vector<Category> cats;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "unknown") throw InvalidConfig("\"unknown\" is reserved and cannot be a category");
    if (!it.value().is_array()) throw InvalidConfig("category \"" + it.key() + "\" must be a list");
    Category c{it.key(), {}};
    for (const auto& t : it.value()) {
      if (!t.is_object() || !t.contains("term") || !t.at("term").is_string())
        throw InvalidConfig("category \"" + it.key() + "\" has an entry without a string \"term\"");
      const double w = t.value("weight", 1.0);
      if (!(w > 0.0)) throw InvalidConfig("term \"" + t.at("term").get<std::string>() + "\" needs a positive weight");
      c.terms.push_back({t.at("term").get<std::string>(), w});
    }
    cats.push_back(std::move(c));
  }
  return CategoryLexicon(std::move(cats));
}

CategoryLexicon CategoryLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open category lexicon: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::vector<ServiceCategory> score_categories(const ResourceDocument& doc, const CategoryLexicon& lexicon) {
  std::vector<std::vector<std::string>> segments;
  for (const auto& ep : doc.api_endpoints) segments.push_back(stems(ep));
  segments.push_back(stems(doc.description));

  std::vector<ServiceCategory> out;
  for (const auto& cat : lexicon.categories()) {
    ServiceCategory sc{cat.label, 0.0, {}};
    double total = 0.0, matched = 0.0;
    for (const auto& t : cat.terms) {
      total += t.weight;
      std::string glued;
      for (const auto& w : raw_words(t.term)) glued += w;
      if (term_matches(stems(t.term), stem(glued), segments)) {
        matched += t.weight;
        sc.matched_features.push_back(t.term);
      }
    }
    sc.score = total > 0.0 ? matched / total : 0.0;
    out.push_back(std::move(sc));
  }
  return out;
}

ServiceCategory classify_service(const ResourceDocument& doc, const CategoryLexicon& lexicon, double threshold) {
  ServiceCategory best;
  for (auto& sc : score_categories(doc, lexicon)) {
    if (sc.score > best.score) best = std::move(sc);  // strict: earlier category wins ties
  }
  if (best.score < threshold) {
    best.label = "unknown";
    if (best.score == 0.0) best.matched_features.clear();
  }
  return best;
}

}  // namespace ontoq
