// Regenerates the replay fixtures and reference data under data/fixtures.
// Output is a pure function of the code: running it twice gives identical bytes.

#include "llmcg/error.hpp"
#include "llmcg/evaluation.hpp"
#include "llmcg/fixture.hpp"
#include "llmcg/graph_io.hpp"
#include "llmcg/pipeline.hpp"
#include "llmcg/semeval.hpp"
#include "llmcg/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace llmcg;

class Rng {
 public:
  explicit Rng(std::uint32_t seed) : engine_(seed) {}

  std::uint32_t below(std::uint32_t n) { return engine_() % n; }
  bool chance(std::uint32_t per_mille) { return below(1000) < per_mille; }
  double latency() { return 6.0 + below(120) / 10.0; }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937 engine_;
};

enum class Answer { A, B, C };

std::string tagged_reply(Answer answer, const std::string& a, const std::string& b) {
  switch (answer) {
    case Answer::A:
      return "The text presents " + a + " as a direct cause of " + b + ".\n<Answer>A</Answer>";
    case Answer::B:
      return "The text presents " + b + " as a direct cause of " + a + ".\n<Answer>B</Answer>";
    case Answer::C:
      break;
  }
  return "The text does not state a direct causal link between " + a + " and " + b +
         ".\n<Answer>C</Answer>";
}

constexpr const char* kUntaggedReply =
    "Both readings are possible, although the first entity most likely drives the second.";

struct Scripted {
  Answer answer = Answer::C;
  bool untagged_first = false;
};

using Script = std::function<Scripted(const Entity& a, const Entity& b)>;

void add_entry(ReplayFixture& fixture, const std::string& fingerprint, std::string reply,
               double latency) {
  auto [it, inserted] = fixture.entries.emplace(fingerprint, FixtureEntry{reply, latency});
  if (!inserted && it->second.reply_text != reply) {
    throw std::runtime_error("conflicting replies for one prompt");
  }
}

struct ScriptedDocument {
  std::vector<Entity> entities;
  ReplayFixture fixture;
};

// Mirrors the pipeline: the entity answer is replayed through the real
// extraction code, then every pair the pipeline will ask about is scripted.
ScriptedDocument script_document(const std::string& text, const std::string& entity_reply,
                                 std::size_t expected_entities, const Script& script, Rng& rng) {
  ScriptedDocument out;
  const RenderedPrompt entity_prompt = render_entity_prompt(text, kMedicalDomainHint);
  add_entry(out.fixture, entity_prompt.fingerprint, entity_reply, rng.latency());
  Gateway gateway(ProviderConfig{}, std::make_shared<ReplayProvider>(out.fixture));
  EntityExtraction extraction = extract_entities(text, kMedicalDomainHint, gateway, 20);
  if (!extraction.warnings.empty() || extraction.entities.size() != expected_entities) {
    throw std::runtime_error("entity script does not match its text");
  }
  out.entities = extraction.entities;
  for (const OrientationQuestion& question : enumerate_pairs(text, out.entities)) {
    const Scripted scripted = script(question.entity_a, question.entity_b);
    const std::string reply = tagged_reply(scripted.answer, question.entity_a.canonical_label,
                                           question.entity_b.canonical_label);
    const RenderedPrompt prompt = render_orientation_prompt(question);
    if (scripted.untagged_first) {
      add_entry(out.fixture, prompt.fingerprint, kUntaggedReply, rng.latency());
      add_entry(out.fixture, render_reask_prompt(question).fingerprint, reply, rng.latency());
    } else {
      add_entry(out.fixture, prompt.fingerprint, reply, rng.latency());
    }
  }
  return out;
}

std::string entity_reply(const std::vector<std::string>& labels,
                         const std::vector<std::vector<std::string>>& groups = {}) {
  std::string reply = "Entities found in the text:\n";
  for (const std::string& label : labels) reply += "<Entity>" + label + "</Entity>\n";
  for (const auto& group : groups) {
    reply += "<Group>";
    for (const std::string& label : group) reply += "<Entity>" + label + "</Entity>";
    reply += "</Group>\n";
  }
  return reply;
}

using LabelArcs = std::vector<std::pair<std::string, std::string>>;

// Answers A/B for the listed arcs and C for everything else.
Script arcs_script(const LabelArcs& arcs) {
  return [arcs](const Entity& a, const Entity& b) {
    for (const auto& [cause, effect] : arcs) {
      if (cause == a.canonical_label && effect == b.canonical_label) return Scripted{Answer::A};
      if (cause == b.canonical_label && effect == a.canonical_label) return Scripted{Answer::B};
    }
    return Scripted{Answer::C};
  };
}

CausalGraph truth_graph(const std::vector<Entity>& entities, const LabelArcs& arcs) {
  CausalGraph graph(GraphKind::GroundTruth);
  for (const Entity& entity : entities) graph.add_entity(entity);
  for (const auto& [cause, effect] : arcs) {
    graph.add_arc({graph.find_by_label(cause)->id, graph.find_by_label(effect)->id,
                   Provenance::GroundTruthAnnotation, std::nullopt, {}});
  }
  return graph;
}

void write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  write_file_atomic(path, content);
}

void write_graph(const fs::path& path, const CausalGraph& graph) {
  write(path, serialize_graph(graph, GraphFormat::StructuredGraphFile));
}

// ---------------------------------------------------------------------------
// Medical abstract with expert-style reference graph.

const std::string kDiabetesText =
    "Fulminant type 1 diabetes (FT1D) is a subtype of type 1 diabetes marked by the abrupt "
    "destruction of the pancreatic \xce\xb2 cells. Recognising FT1D early matters because "
    "untreated patients can progress within days to diabetes ketoacidosis. We survey the factors "
    "reported to trigger FT1D: susceptibility genes, immunological factors on both the cellular "
    "and the humoral side, immune checkpoint inhibitor therapies, drug reactions with "
    "eosinophilia and systemic symptoms, drug-induced hypersensitivity syndrome, pregnancy, "
    "viral infections and vaccine inoculation. The survey is meant to guide work on the "
    "mechanisms behind FT1D onset and on the care of affected patients.\n";

void make_diabetes_review(const fs::path& dir) {
  const std::string ft1d = "fulminant type 1 diabetes";
  const std::vector<std::string> triggers = {
      "destruction of the pancreatic \xce\xb2 cells",
      "susceptibility genes",
      "immunological factors",
      "immune checkpoint inhibitor therapies",
      "drug reactions with eosinophilia and systemic symptoms",
      "drug-induced hypersensitivity syndrome",
      "pregnancy",
      "viral infections",
      "vaccine inoculation"};
  LabelArcs arcs;
  for (const std::string& trigger : triggers) arcs.emplace_back(trigger, ft1d);
  arcs.emplace_back(ft1d, "diabetes ketoacidosis");

  std::vector<std::string> listed = {"viral infections", "pregnancy", "diabetes ketoacidosis",
                                     "susceptibility genes", "vaccine inoculation",
                                     "immune checkpoint inhibitor therapies"};
  for (const std::string& trigger : triggers) {
    if (std::find(listed.begin(), listed.end(), trigger) == listed.end()) listed.push_back(trigger);
  }
  const std::string reply =
      entity_reply(listed, {{"fulminant type 1 diabetes", "FT1D"}});

  Rng rng(2);
  const ScriptedDocument doc = script_document(kDiabetesText, reply, 11, arcs_script(arcs), rng);
  write(dir / "diabetes_review.txt", kDiabetesText);
  save_fixture(doc.fixture, dir / "diabetes_review.replay.json");
  write_graph(dir / "diabetes_review.truth.json", truth_graph(doc.entities, arcs));
}

// ---------------------------------------------------------------------------
// Multiply connected pattern: the model adds the shortcut A -> C.

const std::string kMultiText =
    "After eight weeks of lifetide biofeedback intervention, one participant showed a higher "
    "heart rate variability index while the resting heart rate stayed flat. The authors credit "
    "improved autonomic nervous system regulation and better peripheral microcirculation, which "
    "in turn kept blood glucose levels stable and brought the disease into remission.\n";

void make_multiply_connected(const fs::path& dir) {
  const std::string a = "lifetide biofeedback intervention";
  const std::string b = "autonomic nervous system regulation";
  const std::string c = "blood glucose levels";
  const LabelArcs truth = {{a, b}, {b, c}};
  const LabelArcs answered = {{a, b}, {b, c}, {a, c}};
  Rng rng(4);
  const ScriptedDocument doc =
      script_document(kMultiText, entity_reply({a, b, c}), 3, arcs_script(answered), rng);
  write(dir / "multiply_connected.txt", kMultiText);
  save_fixture(doc.fixture, dir / "multiply_connected.replay.json");
  write_graph(dir / "multiply_connected.truth.json", truth_graph(doc.entities, truth));
}

// ---------------------------------------------------------------------------
// Two directed triangles sharing one node.

void make_two_cycles(const fs::path& dir) {
  const std::vector<std::string> labels = {"insulin resistance", "hyperglycemia",
                                           "oxidative stress", "polyuria", "dehydration"};
  CausalGraph graph(GraphKind::Extracted);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    graph.add_entity(Entity::make(EntityId("e0" + std::to_string(i + 1)), labels[i]));
  }
  const std::vector<std::pair<int, int>> arcs = {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 4}, {4, 1}};
  for (const auto& [cause, effect] : arcs) {
    graph.add_arc({EntityId("e0" + std::to_string(cause + 1)),
                   EntityId("e0" + std::to_string(effect + 1)), Provenance::Imported,
                   std::nullopt, {}});
  }
  write_graph(dir / "two_cycles.graph.json", graph);
}

// ---------------------------------------------------------------------------
// Synthetic abstracts.

const std::vector<std::string> kTerms = {
    "chronic stress",     "cortisol release",     "insulin resistance", "hyperglycemia",
    "weight gain",        "sleep deprivation",    "hypertension",       "arterial stiffness",
    "kidney damage",      "proteinuria",          "smoking",            "airway inflammation",
    "bronchospasm",       "viral infection",      "fever",              "dehydration",
    "tachycardia",        "iron deficiency",      "anemia",             "fatigue",
    "statin therapy",     "ldl cholesterol",      "plaque formation",   "myocardial infarction",
    "heart failure",      "edema",                "antibiotic use",     "gut dysbiosis",
    "diarrhea",           "vitamin d deficiency", "bone loss",          "hip fracture",
    "alcohol intake",     "liver steatosis",      "cirrhosis",          "variceal bleeding",
    "physical activity",  "muscle strength",      "obesity",            "sedentary lifestyle"};

std::string synthetic_text(const std::vector<std::string>& terms, Rng& rng) {
  static const std::array<std::pair<const char*, const char*>, 4> pairs = {{
      {"In the cohort, ", " was frequently accompanied by "},
      {"Patients presenting with ", " also showed "},
      {"We examined how ", " relates to "},
      {"Clinical records linked ", " with "},
  }};
  std::string text;
  std::size_t i = 0;
  for (; i + 1 < terms.size(); i += 2) {
    const auto& [head, middle] = pairs[rng.below(pairs.size())];
    text += std::string(head) + terms[i] + middle + terms[i + 1] + ". ";
  }
  if (i < terms.size()) text += "Finally, " + terms[i] + " was also recorded. ";
  text.back() = '\n';
  return text;
}

struct SyntheticDocument {
  std::string text;
  ScriptedDocument scripted;
  LabelArcs truth;
};

// Truth is a random DAG over the terms. The scripted model finds most true
// arcs, sometimes flips or misses one, and often adds arcs implied by a
// longer true path.
SyntheticDocument make_synthetic(const std::vector<std::string>& terms, Rng& rng,
                                 const std::set<std::size_t>& untagged_pairs = {},
                                 const LabelArcs& forced = {}) {
  SyntheticDocument doc;
  doc.text = synthetic_text(terms, rng);
  const std::size_t n = terms.size();
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = i;
  rng.shuffle(rank);

  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!rng.chance(300)) continue;
      const std::size_t cause = rank[i] < rank[j] ? i : j;
      const std::size_t effect = cause == i ? j : i;
      doc.truth.emplace_back(terms[cause], terms[effect]);
      reach[cause][effect] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
      }
    }
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[terms[i]] = i;
  std::size_t pair_number = 0;
  const LabelArcs truth = doc.truth;
  const Script script = [&](const Entity& a, const Entity& b) {
    Scripted scripted;
    scripted.untagged_first = untagged_pairs.contains(pair_number++);
    for (const auto& [cause, effect] : forced) {
      if (cause == a.canonical_label && effect == b.canonical_label) {
        scripted.answer = Answer::A;
        return scripted;
      }
      if (cause == b.canonical_label && effect == a.canonical_label) {
        scripted.answer = Answer::B;
        return scripted;
      }
    }
    const std::size_t i = index.at(a.canonical_label);
    const std::size_t j = index.at(b.canonical_label);
    const bool forward = std::find(truth.begin(), truth.end(),
                                   std::pair{terms[i], terms[j]}) != truth.end();
    const bool backward = std::find(truth.begin(), truth.end(),
                                    std::pair{terms[j], terms[i]}) != truth.end();
    if (forward || backward) {
      const std::uint32_t roll = rng.below(100);
      const Answer right = forward ? Answer::A : Answer::B;
      const Answer wrong = forward ? Answer::B : Answer::A;
      scripted.answer = roll < 90 ? right : roll < 95 ? wrong : Answer::C;
    } else if (reach[i][j] || reach[j][i]) {
      scripted.answer = rng.chance(400) ? (reach[i][j] ? Answer::A : Answer::B) : Answer::C;
    } else {
      scripted.answer = rng.chance(50) ? (rng.chance(500) ? Answer::A : Answer::B) : Answer::C;
    }
    return scripted;
  };
  doc.scripted = script_document(doc.text, entity_reply(terms), n, script, rng);
  return doc;
}

std::vector<std::string> pick_terms(std::size_t count, Rng& rng) {
  std::vector<std::string> terms = kTerms;
  rng.shuffle(terms);
  terms.resize(count);
  return terms;
}

void make_synthetic_fixtures(const fs::path& dir) {
  {
    Rng rng(10);
    const std::vector<std::string> terms = pick_terms(10, rng);
    // A forced directed triangle over the first three terms.
    const LabelArcs triangle = {{terms[0], terms[1]}, {terms[1], terms[2]}, {terms[2], terms[0]}};
    const SyntheticDocument doc = make_synthetic(terms, rng, {3, 17}, triangle);
    write(dir / "entities10.txt", doc.text);
    save_fixture(doc.scripted.fixture, dir / "entities10.replay.json");
  }
  {
    Rng rng(20);
    const SyntheticDocument doc = make_synthetic(pick_terms(20, rng), rng);
    write(dir / "entities20.txt", doc.text);
    save_fixture(doc.scripted.fixture, dir / "entities20.replay.json");
  }
  Rng rng(30);
  ReplayFixture batch;
  for (int number = 1; number <= 20; ++number) {
    const std::size_t size = 4 + rng.below(5);
    const SyntheticDocument doc = make_synthetic(pick_terms(size, rng), rng);
    char stem[16];
    std::snprintf(stem, sizeof stem, "doc%02d", number);
    write(dir / "batch" / (std::string(stem) + ".txt"), doc.text);
    write_graph(dir / "batch" / (std::string(stem) + ".truth.json"),
                truth_graph(doc.scripted.entities, doc.truth));
    merge_fixture(batch, doc.scripted.fixture);
  }
  save_fixture(batch, dir / "batch" / "batch.replay.json");
}

// ---------------------------------------------------------------------------
// SemEval-format benchmark with scripted orientation answers.

struct Sentence {
  std::string text;  // with <e1>/<e2> tags
  CausalOrientation truth;
};

// Well-known causal sentences; the second list carries the answers
// the model gave, which disagree with the annotation.
const std::vector<Sentence> kCorrectSamples = {
    {"<e1>Zinc</e1> is essential for <e2>growth</e2> and cell division.",
     CausalOrientation::E1CausesE2},
    {"The <e1>infection</e1> came from a <e2>wound</e2>.", CausalOrientation::E2CausesE1},
    {"As we saw earlier, <e1>helicobacter</e1> is responsible for causing <e2>stomach "
     "ulcer</e2>.",
     CausalOrientation::E1CausesE2},
    {"The <e1>pseudolesion</e1> was caused by <e2>drainage</e2> of the paraumbilical vein.",
     CausalOrientation::E2CausesE1},
};

const std::vector<Sentence> kMisorientedSamples = {
    {"<e1>Alternators</e1> generate <e2>electricity</e2> by the same principle as DC "
     "generators.",
     CausalOrientation::E1CausesE2},
    {"The <e1>movement</e1> developed from the <e2>rediscovery</e2> by European scholars of many "
     "Greek and Roman texts.",
     CausalOrientation::E2CausesE1},
    {"The <e1>cow</e1> makes a <e2>sound</e2> called lowing, also known as mooing.",
     CausalOrientation::E1CausesE2},
    {"Defra identified the different <e1>noises</e1> made by <e2>dogs</e2> and the meanings "
     "behind them.",
     CausalOrientation::E2CausesE1},
    {"The relative <e1>calm</e1> produced by the Shia <e2>ceasefire</e2> has coincided with what "
     "the CIA is now calling the \"near strategic defeat\" of al-Qaeda in Iraq.",
     CausalOrientation::E2CausesE1},
    {"The backup <e1>vocals</e1> are from a rather talented <e2>female</e2>, Stephanie Eitel.",
     CausalOrientation::E2CausesE1},
};

const std::vector<std::string> kCauses = {
    "storm",     "virus",     "explosion", "drought",   "earthquake", "leak",
    "spark",     "toxin",     "vibration", "friction",  "overload",   "blizzard",
    "mold",      "pesticide", "smoke",     "parasite",  "landslide",  "heatwave",
    "collision", "surge",     "rumor",     "layoff",    "tremor",     "avalanche",
    "outbreak",  "typhoon",   "meteor",    "lightning", "tsunami",    "pollutant"};

const std::vector<std::string> kEffects = {
    "damage",  "panic",    "erosion",   "corrosion", "outage",    "injury",
    "delay",   "rash",     "cough",     "collapse",  "shortage",  "famine",
    "anxiety", "blackout", "headache",  "cracks",    "casualties", "evacuation",
    "wear",    "swelling", "nausea",    "unrest",    "debt",      "fatalities",
    "scarring", "paralysis", "bruising", "insomnia", "migration", "turmoil"};

const std::vector<std::string> kContexts = {
    "in the northern district",  "during the night",        "along the coast",
    "across the valley",         "within two weeks",        "in several villages",
    "near the old harbour",      "throughout the region",   "over the winter",
    "in the mountain towns",     "according to the report", "last season"};

std::string capitalized(std::string text) {
  text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text;
}

std::string causal_sentence(CausalOrientation truth, Rng& rng) {
  const std::string cause = kCauses[rng.below(kCauses.size())];
  const std::string effect = kEffects[rng.below(kEffects.size())];
  const std::string context = kContexts[rng.below(kContexts.size())];
  const std::uint32_t form = rng.below(3);
  if (truth == CausalOrientation::E1CausesE2) {
    if (form == 0) return "The <e1>" + cause + "</e1> caused <e2>" + effect + "</e2> " + context + ".";
    if (form == 1) return "A <e1>" + cause + "</e1> led to <e2>" + effect + "</e2> " + context + ".";
    return capitalized(context) + ", the <e1>" + cause + "</e1> triggered <e2>" + effect + "</e2>.";
  }
  if (form == 0) return "The <e1>" + effect + "</e1> was caused by the <e2>" + cause + "</e2> " + context + ".";
  if (form == 1) return "The <e1>" + effect + "</e1> resulted from a <e2>" + cause + "</e2> " + context + ".";
  return capitalized(context) + ", <e1>" + effect + "</e1> came from the <e2>" + cause + "</e2>.";
}

const std::vector<std::string> kParts = {"handle", "lid",    "wheel", "keyboard", "roof",
                                         "engine", "button", "page",  "branch",   "lens"};
const std::vector<std::string> kWholes = {"door",    "kettle",  "bicycle", "laptop", "house",
                                          "tractor", "remote",  "book",    "tree",   "camera"};

struct NonCausal {
  std::string text;
  std::string label;
};

NonCausal non_causal_sentence(Rng& rng) {
  const std::string part = kParts[rng.below(kParts.size())];
  const std::string whole = kWholes[rng.below(kWholes.size())];
  switch (rng.below(4)) {
    case 0:
      return {"The <e1>" + part + "</e1> of the <e2>" + whole + "</e2> was replaced.",
              "Component-Whole(e1,e2)"};
    case 1:
      return {"The <e1>" + whole + "</e1> has a broken <e2>" + part + "</e2>.",
              "Component-Whole(e2,e1)"};
    case 2:
      return {"We kept the <e1>" + part + "</e1> inside a <e2>" + whole + "</e2> box.",
              "Content-Container(e1,e2)"};
    default:
      return {"The <e1>" + part + "</e1> lay next to the <e2>" + whole + "</e2>.", "Other"};
  }
}

std::string relation_label(CausalOrientation orientation) {
  return orientation == CausalOrientation::E1CausesE2 ? "Cause-Effect(e1,e2)"
                                                      : "Cause-Effect(e2,e1)";
}

// Turns one tagged sentence into a record by reusing the parser.
SemEvalRecord make_record(long id, const std::string& tagged, const std::string& label,
                          std::optional<std::string> comment) {
  std::string block = std::to_string(id) + "\t\"" + tagged + "\"\n" + label + "\n";
  if (comment) block += "Comment:" + *comment + "\n";
  block += "\n";
  return parse_semeval(block).at(0);
}

struct Planned {
  std::string tagged;
  std::string label;
  std::optional<Answer> answer;  // unset for non-causal records
};

Answer other(Answer answer) { return answer == Answer::A ? Answer::B : Answer::A; }

Answer right_answer(CausalOrientation truth) {
  return truth == CausalOrientation::E1CausesE2 ? Answer::A : Answer::B;
}

void make_semeval(const fs::path& dir) {
  Rng rng(3);
  std::set<std::string> used;
  std::vector<Planned> plan;
  for (const Sentence& s : kCorrectSamples) {
    plan.push_back({s.text, relation_label(s.truth), right_answer(s.truth)});
    used.insert(s.text);
  }
  for (const Sentence& s : kMisorientedSamples) {
    plan.push_back({s.text, relation_label(s.truth), other(right_answer(s.truth))});
    used.insert(s.text);
  }

  // [predicted][truth] counts of the benchmark grid plus the abstentions.
  struct Cell {
    CausalOrientation truth;
    std::optional<Answer> predicted;  // nullopt: abstains
    std::size_t count;
  };
  const std::vector<Cell> cells = {
      {CausalOrientation::E1CausesE2, Answer::A, 335},
      {CausalOrientation::E2CausesE1, Answer::A, 7},
      {CausalOrientation::E1CausesE2, Answer::B, 6},
      {CausalOrientation::E2CausesE1, Answer::B, 650},
      {CausalOrientation::E1CausesE2, std::nullopt, 2},
      {CausalOrientation::E2CausesE1, std::nullopt, 3},
  };
  for (const Cell& cell : cells) {
    std::size_t have = 0;
    for (const Planned& p : plan) {
      const bool same_truth = p.label == relation_label(cell.truth);
      const Answer predicted = cell.predicted.value_or(Answer::C);
      if (same_truth && p.answer == predicted) ++have;
    }
    while (have < cell.count) {
      const std::string tagged = causal_sentence(cell.truth, rng);
      if (!used.insert(tagged).second) continue;
      plan.push_back({tagged, relation_label(cell.truth), cell.predicted.value_or(Answer::C)});
      ++have;
    }
  }
  for (int i = 0; i < 24;) {
    const NonCausal s = non_causal_sentence(rng);
    if (!used.insert(s.text).second) continue;
    plan.push_back({s.text, s.label, std::nullopt});
    ++i;
  }
  rng.shuffle(plan);

  std::vector<SemEvalRecord> records;
  ReplayFixture fixture;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const Planned& p = plan[i];
    const std::optional<std::string> comment =
        rng.chance(100) ? std::optional<std::string>("\tannotator note " + std::to_string(i))
                        : std::optional<std::string>("");
    records.push_back(make_record(static_cast<long>(i + 1), p.tagged, p.label, comment));
    if (!p.answer) continue;
    const OrientationQuestion question = orientation_question(records.back());
    add_entry(fixture, render_orientation_prompt(question).fingerprint,
              tagged_reply(*p.answer, question.entity_a.canonical_label,
                           question.entity_b.canonical_label),
              rng.latency());
  }
  write(dir / "semeval_benchmark.txt", write_semeval(records));
  save_fixture(fixture, dir / "semeval_benchmark.replay.json");

  // A smaller mixed sample for parser round trips.
  Rng sample_rng(5);
  std::vector<SemEvalRecord> sample;
  long id = 8001;
  for (const Sentence& s : kCorrectSamples) {
    sample.push_back(make_record(id++, s.text, relation_label(s.truth), std::string()));
  }
  std::set<std::string> sample_used(used.begin(), used.end());
  while (sample.size() < 100) {
    std::optional<std::string> comment;
    switch (sample_rng.below(3)) {
      case 0: comment = std::string(); break;
      case 1: comment = "\tchecked twice"; break;
      default: break;
    }
    if (sample_rng.chance(600)) {
      const CausalOrientation truth = sample_rng.chance(500) ? CausalOrientation::E1CausesE2
                                                             : CausalOrientation::E2CausesE1;
      const std::string tagged = causal_sentence(truth, sample_rng);
      if (!sample_used.insert(tagged).second) continue;
      sample.push_back(make_record(id++, tagged, relation_label(truth), comment));
    } else {
      const NonCausal s = non_causal_sentence(sample_rng);
      if (!sample_used.insert(s.text).second) continue;
      sample.push_back(make_record(id++, s.text, s.label, comment));
    }
  }
  write(dir / "semeval_sample.txt", write_semeval(sample));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures OUTPUT_DIR\n";
    return 1;
  }
  const fs::path dir = argv[1];
  try {
    make_semeval(dir);
    make_diabetes_review(dir);
    make_multiply_connected(dir);
    make_two_cycles(dir);
    make_synthetic_fixtures(dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
