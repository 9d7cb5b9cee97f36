#include <doctest.h>

#include "slotshot/dataset_builder.hpp"
#include "slotshot/error.hpp"
#include "slotshot/negatives.hpp"
#include "slotshot/querification.hpp"
#include "slotshot/synthetic.hpp"

using namespace slotshot;

namespace {

const Entity kEinstein{"Q937", "Albert Einstein", {"Einstein"}};

Document einstein_doc() {
  return make_document(
      "Q937", std::vector<std::string>{
                  "Albert Einstein was a German-born theoretical physicist.",
                  "Albert Einstein was awarded a PhD by the University of Zürich, with his "
                  "dissertation titled A New Determination of Molecular Dimensions.",
                  "Einstein later returned to the University of Zürich as a professor."});
}

QuestionTemplate verified(std::string id, std::string rel, std::string text) {
  QuestionTemplate t;
  t.id = std::move(id);
  t.relation_id = std::move(rel);
  t.text = std::move(text);
  t.status = TemplateStatus::kVerified;
  return t;
}

}  // namespace

TEST_CASE("align_fact picks the first matching sentence") {
  const auto doc = einstein_doc();
  const auto hit = align_fact(doc, kEinstein, {"educated_at", "Q937", "University of Zürich"});
  REQUIRE(hit);
  CHECK(hit->first.index == 1);
  CHECK(hit->second.text == "University of Zürich");
  CHECK(hit->first.tokens[hit->second.token_start].text == "University");

  CHECK_FALSE(align_fact(doc, kEinstein, {"educated_at", "Q937", "ETH Zurich"}));
  // Case-insensitive on tokens, but never on partial tokens.
  CHECK(align_fact(doc, kEinstein, {"x", "Q937", "university OF zürich"}));
  CHECK_FALSE(align_fact(doc, kEinstein, {"x", "Q937", "Zür"}));
}

TEST_CASE("align_fact agrees with a linear scan") {
  std::vector<std::string> sentences = {"Bo Li likes tea.", "Nothing here.", "Tea is good.",
                                        "Bo Li drinks tea daily.", "Li loves tea."};
  const Entity bo{"E", "Bo Li", {"Li"}};
  const auto doc = make_document("E", sentences);
  for (const std::string object : {"tea", "daily", "good", "coffee"}) {
    std::optional<std::size_t> expected;
    for (std::size_t i = 0; i < sentences.size() && !expected; ++i) {
      const auto folded = folded_tokens(sentences[i]);
      const bool entity = find_sequence(folded, folded_tokens("bo li")) ||
                          find_sequence(folded, folded_tokens("li"));
      if (entity && find_sequence(folded, folded_tokens(object))) expected = i;
    }
    const auto got = align_fact(doc, bo, {"r", "E", object});
    CHECK(got.has_value() == expected.has_value());
    if (got && expected) CHECK(got->first.index == *expected);
  }
}

TEST_CASE("group_instances merges answers of one sentence") {
  const auto s = make_sentence("Q19837", 0,
                               "Steve Jobs was an American businessman, inventor, and industrial "
                               "designer.");
  const Entity jobs{"Q19837", "Steve Jobs", {}};
  std::vector<AlignedFact> aligned = {
      {"occupation", jobs, s, make_answer(s, 5, 5)},
      {"occupation", jobs, s, make_answer(s, 7, 7)},
      {"occupation", jobs, s, make_answer(s, 10, 11)},
      {"occupation", jobs, s, make_answer(s, 5, 5)},  // duplicate
  };
  const auto grouped = group_instances(aligned);
  REQUIRE(grouped.size() == 1);
  REQUIRE(grouped[0].answers.size() == 3);
  CHECK(grouped[0].answers[0].text == "businessman");
  CHECK(grouped[0].answers[2].text == "industrial designer");

  std::reverse(aligned.begin(), aligned.end());
  CHECK(group_instances(aligned) == grouped);
  CHECK(group_instances({aligned[0]}).size() == 1);
}

TEST_CASE("build_instances reports drops and ignores thread count") {
  SyntheticOptions opt;
  opt.seed = 3;
  opt.entities = 60;
  const auto corpus = generate_corpus(opt);
  std::map<std::string, std::pair<Document, Entity>> docs;
  for (std::size_t i = 0; i < corpus.entities.size(); ++i) {
    docs[corpus.entities[i].id] = {corpus.documents[i], corpus.entities[i]};
  }
  auto facts = corpus.facts;
  facts.push_back({"R01", "E_MISSING", "Nowhere"});
  const auto one = build_instances(docs, facts, 1);
  const auto four = build_instances(docs, facts, 4);
  CHECK(one.instances == four.instances);
  CHECK(one.report.facts_total == facts.size());
  CHECK(one.report.dropped_no_document == 1);
  CHECK(one.report.facts_aligned + one.report.dropped_no_document + one.report.dropped_no_match ==
        facts.size());
  for (const auto& inst : one.instances) CHECK_NOTHROW(validate(inst));
}

TEST_CASE("instantiate and validate templates") {
  CHECK(instantiate("What is {x}'s alma mater?", kEinstein) ==
        "What is Albert Einstein's alma mater?");
  CHECK(instantiate("{x}", Entity{"e", "A", {}}) == "A");
  CHECK_THROWS_AS(check_placeholder("{x} and {x}"), MalformedTemplateError);
  CHECK_THROWS_AS(check_placeholder("no placeholder"), MalformedTemplateError);
  CHECK(count_placeholders("{x}{x}{x}") == 3);
}

TEST_CASE("join_schema pairs by relation") {
  const auto s1 = make_sentence("E1", 0, "Steve Jobs was a businessman.");
  const auto s2 = make_sentence("E2", 0, "Ada Lovelace was a mathematician.");
  std::vector<SlotFillingInstance> inst = {
      {"occupation", {"E1", "Steve Jobs", {}}, s1, {make_answer(s1, 4, 4)}},
      {"occupation", {"E2", "Ada Lovelace", {}}, s2, {make_answer(s2, 4, 4)}}};
  std::vector<QuestionTemplate> templates = {
      verified("o1", "occupation", "What did {x} do for a living?"),
      verified("o2", "occupation", "What is {x}'s job?"),
      verified("o3", "occupation", "What was {x}'s profession?"),
      verified("s1", "spouse", "Who is {x} married to?")};
  const auto examples = join_schema(templates, inst);
  CHECK(examples.size() == 6);
  for (const auto& e : examples) {
    CHECK(e.relation_id == "occupation");
    CHECK(e.polarity == Polarity::kPositive);
    CHECK(e.question_text.find(e.entity_name) != std::string::npos);
  }
  std::reverse(inst.begin(), inst.end());
  CHECK(join_schema(templates, inst) == examples);

  templates[0].status = TemplateStatus::kCandidate;
  CHECK_THROWS_AS(join_schema(templates, inst), DataError);
  CHECK(verified_only(templates).size() == 3);
}

TEST_CASE("contains_answer") {
  const auto occ = make_sentence(
      "E", 0, "Angela Merkel is a German politician who is currently the Chancellor of Germany.");
  std::vector<std::string> sauer = {"Joachim Sauer"};
  CHECK_FALSE(contains_answer(occ, sauer));
  CHECK(contains_answer(make_sentence("E", 1, "She married Joachim Sauer."), sauer));
  CHECK(contains_answer(make_sentence("E", 2, "She met joachim SAUER there."), sauer));
  CHECK_FALSE(contains_answer(make_sentence("E", 3, "She met Joachim Sauerbruch."), sauer));
}

TEST_CASE("negatives pair other relations of the same entity") {
  const Entity merkel{"E", "Angela Merkel", {}};
  const auto occ = make_sentence(
      "E", 0, "Angela Merkel is a German politician who is currently the Chancellor of Germany.");
  const auto sp = make_sentence("E", 1, "Angela Merkel married Joachim Sauer.");
  const auto leak = make_sentence("E", 2, "Angela Merkel and Joachim Sauer are chemists.");
  std::vector<SlotFillingInstance> inst = {
      {"occupation", merkel, occ, {make_answer(occ, 5, 5)}},
      {"spouse", merkel, sp, {make_answer(sp, 3, 4)}},
      {"occupation", merkel, leak, {make_answer(leak, 6, 6)}},
  };
  std::vector<QuestionTemplate> templates = {
      verified("s1", "spouse", "Who is {x} married to?"),
      verified("o1", "occupation", "What does {x} do?")};
  const auto neg = generate_negatives_count(inst, templates, 100, 1);
  // spouse x {occ} (leak contains the spouse answer), occupation x {sp}.
  CHECK(neg.candidates == 2);
  REQUIRE(neg.examples.size() == 2);
  CHECK(neg.short_of_target());
  for (const auto& e : neg.examples) {
    CHECK(e.answers.empty());
    CHECK(e.polarity == Polarity::kNegative);
    CHECK(e.sentence.index != 2);
  }
  const auto spouse_q = std::find_if(neg.examples.begin(), neg.examples.end(),
                                     [](const RCExample& e) { return e.relation_id == "spouse"; });
  REQUIRE(spouse_q != neg.examples.end());
  CHECK(spouse_q->question_text == "Who is Angela Merkel married to?");
  CHECK(spouse_q->sentence.index == 0);

  // An entity with a single relation has nothing to pair with.
  std::vector<SlotFillingInstance> lone = {inst[1]};
  CHECK(generate_negatives_count(lone, templates, 10, 1).examples.empty());
}

TEST_CASE("negatives are seeded and safe on a generated corpus") {
  SyntheticOptions opt;
  opt.seed = 9;
  opt.entities = 120;
  const auto corpus = generate_corpus(opt);
  std::map<std::string, std::pair<Document, Entity>> docs;
  for (std::size_t i = 0; i < corpus.entities.size(); ++i) {
    docs[corpus.entities[i].id] = {corpus.documents[i], corpus.entities[i]};
  }
  const auto instances = build_instances(docs, corpus.facts).instances;
  const auto a = generate_negatives(instances, corpus.templates, 1.0, 42, 1);
  const auto b = generate_negatives(instances, corpus.templates, 1.0, 42, 3);
  const auto c = generate_negatives(instances, corpus.templates, 1.0, 43, 1);
  CHECK(a.examples == b.examples);
  CHECK(a.examples != c.examples);
  CHECK(a.requested == join_schema(corpus.templates, instances).size());

  std::map<std::pair<std::string, std::string>, std::vector<std::string>> gold;
  for (const auto& inst : instances) {
    for (const auto& ans : inst.answers) gold[{inst.relation_id, inst.entity.id}].push_back(ans.text);
  }
  for (const auto& e : a.examples) {
    const auto& answers = gold[{e.relation_id, e.entity_id}];
    CHECK_FALSE(contains_answer(e.sentence, answers));
  }
  const auto half = generate_negatives(instances, corpus.templates, 2.0, 42, 1);
  CHECK(half.requested == a.requested / 2);
}
