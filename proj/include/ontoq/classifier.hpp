#pragma once

// Keyword-weight classification of SaaS services from their API surface.
//
// Each category carries weighted terms. A term matches when its words occur
// as consecutive words of an endpoint or the description (after light
// stemming), or when they occur glued together as one word ("check out"
// matches "checkout"). score = matched weight / total category weight.

#include <string>
#include <vector>

namespace ontoq {

struct ResourceDocument;

struct CategoryTerm {
  std::string term;
  double weight = 1.0;
};

struct Category {
  std::string label;
  std::vector<CategoryTerm> terms;
};

class CategoryLexicon {
 public:
  /// Categories are kept in the fixed tie-break order
  /// ecommerce < sales < identity < storage < analytics, followed by any
  /// other categories in name order.
  explicit CategoryLexicon(std::vector<Category> categories);

  /// Throws IoError or InvalidConfig.
  static CategoryLexicon load(const std::string& path);
  static CategoryLexicon from_json_text(const std::string& text);

  const std::vector<Category>& categories() const { return categories_; }

 private:
  std::vector<Category> categories_;
};

inline constexpr double kClassificationThreshold = 0.3;

struct ServiceCategory {
  std::string label = "unknown";
  double score = 0.0;
  std::vector<std::string> matched_features;
};

ServiceCategory classify_service(const ResourceDocument& doc, const CategoryLexicon& lexicon,
                                 double threshold = kClassificationThreshold);

/// Per-category scores, in lexicon order.
std::vector<ServiceCategory> score_categories(const ResourceDocument& doc, const CategoryLexicon& lexicon);

}  // namespace ontoq
