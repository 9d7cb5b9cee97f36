#include "slotshot/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <string_view>

#include "slotshot/error.hpp"
#include "slotshot/random.hpp"

namespace slotshot {
namespace {

using Pool = std::vector<std::string_view>;

const Pool kCities = {"Lyon",  "Porto", "Krakow", "Tampere", "Ghent",   "Bergen", "Turin",
                      "Utrecht", "Graz", "Seville", "Leeds", "Brno",    "Aarhus", "Malmo",
                      "Bilbao", "Lodz", "Odense", "Basel", "Nantes",  "Verona"};
const Pool kCountries = {"France", "Portugal", "Poland", "Finland", "Belgium", "Norway",
                         "Italy",  "Austria",  "Spain",  "Denmark", "Chile",   "Peru",
                         "Canada", "Kenya",    "Iceland", "Estonia"};
const Pool kUniversities = {"Princeton University", "University of Zurich", "Leiden University",
                            "University of Bologna", "Uppsala University", "Heidelberg University",
                            "Trinity College",      "University of Coimbra", "Ghent University",
                            "Charles University"};
const Pool kCompanies = {"Norsk Hydro", "Vesta Motors", "Arbor Systems", "Kestrel Labs",
                         "Halcyon Freight", "Orion Textiles", "Bluewater Mills", "Corvid Optics"};
const Pool kPeople = {"Joachim Sauer", "Elena Varga",  "Tomas Quill",   "Ines Marlow",
                      "Pavel Ostrik",  "Greta Holm",   "Anton Reyes",   "Lucia Fenn",
                      "Oskar Brandt",  "Mira Castell", "Felix Aurel",   "Sofia Lindqvist",
                      "Ruben Okafor",  "Clara Dunmore", "Viktor Sallas", "Hanna Moreau"};
const Pool kDistractors = {"Lena Ortiz",   "Marcus Webb",  "Ada Kowal",   "Simon Price",
                           "Nora Bell",    "Igor Petrov",  "Julia Stone", "Emil Haas",
                           "Rosa Lindgren", "Theo Marsh",  "Vera Nash",   "Karl Uhde"};
const Pool kParties = {"Green Alliance", "Liberal Union", "Farmers League", "Civic Forum",
                       "Labour Front", "Unity Party"};
const Pool kAwards = {"Halden Prize", "Marek Medal", "Corwin Award", "Aster Prize",
                      "Lumen Medal", "Stellan Award"};
const Pool kBranches = {"Royal Navy", "Coastal Guard", "Mountain Corps", "Air Command",
                        "Signal Corps"};
const Pool kReligions = {"Lutheranism", "Catholicism", "Buddhism", "Judaism", "Quakerism",
                         "Anglicanism"};
const Pool kLanguages = {"Finnish", "Catalan", "Basque", "Welsh", "Maltese", "Frisian", "Breton"};
const Pool kTeams = {"Red Falcons", "Iron Wolves", "Silver Comets", "Northern Stags",
                     "Harbor Kings", "Valley Hawks"};
const Pool kPublishers = {"Harbor House", "Quill Press", "Lantern Books", "Meridian Editions",
                          "Owlfeather Press"};
const Pool kOccupations = {"carpenter", "chemist",  "novelist", "architect", "sculptor",
                           "economist", "surveyor", "botanist", "engraver",  "cartographer"};
const Pool kInstruments = {"violin", "cello", "piano", "trumpet", "oboe", "harp", "clarinet"};
const Pool kSports = {"fencing", "rowing", "cycling", "tennis", "archery", "wrestling"};
const Pool kGenres = {"jazz", "opera", "folk", "chamber", "choral", "ballet"};
const Pool kCauses = {"pneumonia", "tuberculosis", "cholera", "malaria", "influenza"};
const Pool kFields = {"chemistry", "linguistics", "astronomy", "geology", "botany", "optics"};
const Pool kColors = {"green", "grey", "hazel", "brown", "blue", "amber"};

struct RelationSpec {
  std::string_view id;
  std::string_view name;
  const Pool* values;  // nullptr: years
  bool year = false;
  std::vector<std::string_view> patterns;   // {x} entity, {y} value
  std::vector<std::string_view> templates;  // {x} placeholder
};

const std::vector<RelationSpec>& catalog() {
  static const std::vector<RelationSpec> specs = {
      {"R01", "educated_at", &kUniversities, false,
       {"{x} studied at {y} and graduated with honors.",
        "After school, {x} graduated from {y} with a degree in law."},
       {"Where did {x} graduate from?", "Which university did {x} study at?",
        "Where did {x} study?", "What is {x}'s alma mater?"}},
      {"R02", "place_of_birth", &kCities, false,
       {"{x} was born in {y} to a family of merchants.",
        "Born in {y}, {x} spent a quiet childhood there."},
       {"Where was {x} born?", "In which city was {x} born?", "What is {x}'s birthplace?",
        "Which town was {x} born in?"}},
      {"R03", "date_of_birth", nullptr, true,
       {"{x} was born on a winter morning in {y}.", "{x} first saw the light of day in {y}."},
       {"When was {x} born?", "In what year was {x} born?", "What year was {x} born in?",
        "What is {x}'s year of birth?"}},
      {"R04", "date_of_death", nullptr, true,
       {"{x} died in {y} after a long illness.", "{x} passed away quietly in {y}."},
       {"When did {x} die?", "In what year did {x} die?", "What year did {x} pass away?",
        "When did {x} pass away?"}},
      {"R05", "spouse", &kPeople, false,
       {"{x} married {y} in a small ceremony.", "{x} was married to {y} for many years."},
       {"Who is {x} married to?", "Who did {x} marry?", "Who is {x}'s spouse?",
        "Who was {x}'s wife or husband?"}},
      {"R06", "father", &kPeople, false,
       {"{x}'s father was {y}, a local merchant.", "{x} was raised by a father, {y}, in the countryside."},
       {"Who is {x}'s father?", "Who was the father of {x}?",
        "What is the name of {x}'s father?", "Who fathered {x}?"}},
      {"R07", "mother", &kPeople, false,
       {"{x}'s mother was {y}, who raised the children alone.",
        "{x} often visited a mother, {y}, on weekends."},
       {"Who is {x}'s mother?", "Who was the mother of {x}?",
        "What is the name of {x}'s mother?", "Who gave birth to {x}?"}},
      {"R08", "employer", &kCompanies, false,
       {"{x} worked for {y} as an engineer.", "{x} was employed by {y} for a decade."},
       {"Who did {x} work for?", "Which company employed {x}?", "What company did {x} work for?",
        "Where did {x} work?"}},
      {"R09", "occupation", &kOccupations, false,
       {"{x} worked as a {y} in the capital.", "By profession, {x} was a {y}.",
        "{x} earned a living as a {y}."},
       {"What did {x} work as?", "What was {x}'s occupation?", "What did {x} do for a living?",
        "What is {x}'s profession?"}},
      {"R10", "instrument", &kInstruments, false,
       {"{x} played the {y} in a chamber orchestra.", "{x}'s instrument of choice was the {y}."},
       {"What instrument did {x} play?", "Which instrument does {x} play?", "What did {x} play?",
        "What is {x}'s instrument?"}},
      {"R11", "sport", &kSports, false,
       {"{x} competed in {y} at the national level.", "{x} trained daily for {y} competitions."},
       {"What sport did {x} compete in?", "Which sport did {x} train for?",
        "In what sport did {x} compete?", "What sport did {x} practice?"}},
      {"R12", "genre", &kGenres, false,
       {"{x} composed mostly {y} music.", "{x} became known for {y} compositions."},
       {"What genre did {x} compose?", "What kind of music did {x} compose?",
        "What is {x}'s genre?", "What type of compositions is {x} known for?"}},
      {"R13", "cause_of_death", &kCauses, false,
       {"{x} succumbed to {y} at home.", "{x} succumbed to {y} in hospital."},
       {"What did {x} succumb to?", "What was {x}'s cause of death?", "What killed {x}?",
        "What illness did {x} succumb to?"}},
      {"R14", "country_of_citizenship", &kCountries, false,
       {"{x} held citizenship of {y} throughout life.", "{x} became a citizen of {y} as an adult."},
       {"What country is {x} a citizen of?", "Which country's citizenship did {x} hold?",
        "What is {x}'s nationality?", "Where is {x} a citizen?"}},
      {"R15", "residence", &kCities, false,
       {"{x} lived in {y} for most of the decade.", "{x} resided in {y} until retirement."},
       {"Where did {x} live?", "In which city did {x} reside?", "What city did {x} live in?",
        "Where was {x}'s home?"}},
      {"R16", "work_location", &kCities, false,
       {"{x} had an office in {y}.", "{x} kept an office in {y} near the harbor."},
       {"Where did {x} have an office?", "In which city was {x}'s office?",
        "Where was {x} based?", "What city was {x}'s office in?"}},
      {"R17", "member_of_political_party", &kParties, false,
       {"{x} joined the {y} as a young activist.", "{x} was a member of the {y}."},
       {"Which party did {x} join?", "What political party was {x} a member of?",
        "Which party was {x} a member of?", "What party did {x} belong to?"}},
      {"R18", "award_received", &kAwards, false,
       {"{x} received the {y} for pioneering research.", "{x} was awarded the {y} late in life."},
       {"What award did {x} receive?", "Which prize was {x} awarded?", "What did {x} win?",
        "Which award did {x} receive?"}},
      {"R19", "doctoral_advisor", &kPeople, false,
       {"{x} wrote a doctoral thesis under {y}.", "{x} was advised by {y} during doctoral studies."},
       {"Who was {x}'s doctoral advisor?", "Who advised {x}'s thesis?",
        "Under whom did {x} study?", "Who supervised {x}'s doctoral thesis?"}},
      {"R20", "sibling", &kPeople, false,
       {"{x} grew up alongside a brother, {y}.", "{x}'s brother {y} also became famous."},
       {"Who is {x}'s brother?", "Who is {x}'s sibling?", "Who grew up with {x}?",
        "Who was the brother of {x}?"}},
      {"R21", "military_branch", &kBranches, false,
       {"{x} served in the {y} during the war.", "{x} enlisted in the {y} at eighteen."},
       {"In which branch did {x} serve?", "Where did {x} serve?",
        "What military branch did {x} serve in?", "Which service did {x} enlist in?"}},
      {"R22", "religion", &kReligions, false,
       {"{x} was raised in {y} by devout parents.", "{x} followed {y} faithfully."},
       {"What religion did {x} follow?", "What faith was {x} raised in?",
        "Which religion did {x} follow?", "What is {x}'s religion?"}},
      {"R23", "languages_spoken", &kLanguages, false,
       {"{x} spoke {y} at home.", "{x} spoke fluent {y} with neighbours."},
       {"What language did {x} speak?", "Which language does {x} speak?",
        "What languages did {x} speak?", "In what language did {x} write?"}},
      {"R24", "debut_year", nullptr, true,
       {"{x} made a professional debut in {y}.", "{x} debuted on stage in {y}."},
       {"When did {x} debut?", "In what year did {x} make a debut?", "What year was {x}'s debut?",
        "When did {x} first perform professionally?"}},
      {"R25", "field_of_work", &kFields, false,
       {"{x} did research in {y} for decades.", "{x} taught {y} at a provincial college."},
       {"What field did {x} research?", "In what field did {x} work?",
        "What was {x}'s field of research?", "What subject did {x} teach?"}},
      {"R26", "eye_color", &kColors, false,
       {"{x} had {y} eyes.", "{x}'s eyes were {y}."},
       {"What color were {x}'s eyes?", "What is {x}'s eye color?", "What colour are {x}'s eyes?",
        "Which eye colour does {x} have?"}},
      {"R27", "member_of_sports_team", &kTeams, false,
       {"{x} played for the {y} for three seasons.", "{x} signed with the {y} as a rookie."},
       {"Which team did {x} play for?", "What team did {x} play for?", "Who did {x} play for?",
        "What club did {x} sign with?"}},
      {"R28", "publisher", &kPublishers, false,
       {"{x} published several novels with {y}.", "{x}'s novels were published by {y}."},
       {"Who published {x}'s novels?", "Which publisher did {x} use?",
        "What company published {x}'s work?", "Which house published {x}?"}},
      {"R29", "named_after", &kPeople, false,
       {"{x} was named after {y}, a great-uncle.", "{x} was named in honor of {y}."},
       {"Who was {x} named after?", "After whom was {x} named?", "Who is {x}'s namesake?",
        "Whose name does {x} carry?"}},
      {"R30", "manager", &kPeople, false,
       {"{x} was managed by {y} early on.", "{x} hired {y} to manage bookings."},
       {"Who managed {x}?", "Who was {x}'s manager?", "Who was in charge of {x}'s career?",
        "Who managed {x}'s career?"}},
  };
  return specs;
}

const Pool kFirstNames = {"Maria", "Johan", "Anna",  "Lukas",  "Eva",    "Piotr", "Ingrid", "Marco",
                          "Sara",  "Tobias", "Helga", "Andre", "Nina",   "Rafael", "Elin",  "Jonas",
                          "Petra", "Stefan", "Alma",  "Mateo", "Freja", "Dario", "Leona", "Bruno",
                          "Irene", "Milan",  "Olga",  "Hugo",  "Agnes", "Casper"};
const Pool kLastNames = {"Berg",    "Novak",  "Lindahl", "Ferreira", "Kowalski", "Haugen",  "Rossi",
                         "Vos",     "Keller", "Moreno",  "Dahl",     "Szabo",    "Laine",   "Brenner",
                         "Ortega",  "Falk",   "Nilsen",  "Romero",   "Wagner",   "Eklund",  "Costa",
                         "Varela",  "Horvat", "Lund",    "Mertens",  "Sousa",    "Krause",  "Strand",
                         "Albrecht", "Quist"};
const Pool kDescriptors = {"writer", "scientist", "musician", "athlete", "civil servant",
                           "painter", "teacher", "diplomat"};
const Pool kDistractorLeads = {"According to {d} and {d}, ", "As {d} recalled, ",
                                "In a letter from {d} to {d}, ", "As {d} told {d}, ",
                                "Writing to {d}, "};

std::string pick(const Pool& pool, Rng& rng) { return std::string(pool[rng.index(pool.size())]); }

std::string fill(std::string_view pattern, const std::string& x, const std::string& y) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern.substr(i, 3) == "{x}") {
      out += x;
      i += 2;
    } else if (pattern.substr(i, 3) == "{y}") {
      out += y;
      i += 2;
    } else {
      out += pattern[i];
    }
  }
  return out;
}

}  // namespace

std::size_t synthetic_catalog_size() { return catalog().size(); }

SyntheticCorpus generate_corpus(const SyntheticOptions& options) {
  const auto& specs = catalog();
  if (options.relations == 0 || options.relations > specs.size()) {
    throw DataError("synthetic corpus supports 1.." + std::to_string(specs.size()) + " relations");
  }
  if (options.entities > kFirstNames.size() * kLastNames.size()) {
    throw DataError("too many synthetic entities requested");
  }
  Rng rng(mix_seed(options.seed, "synthetic"));
  SyntheticCorpus corpus;

  for (std::size_t r = 0; r < options.relations; ++r) {
    const auto& spec = specs[r];
    corpus.relations.push_back({std::string(spec.id), std::string(spec.name)});
    for (std::size_t t = 0; t < spec.templates.size(); ++t) {
      QuestionTemplate tmpl;
      tmpl.id = std::string(spec.id) + "-q" + std::to_string(t);
      tmpl.relation_id = std::string(spec.id);
      tmpl.text = std::string(spec.templates[t]);
      tmpl.source = TemplateSource::kManual;
      tmpl.status = TemplateStatus::kVerified;
      corpus.templates.push_back(std::move(tmpl));
    }
  }

  // Distinct full names.
  std::vector<std::pair<std::size_t, std::size_t>> names;
  for (std::size_t f = 0; f < kFirstNames.size(); ++f) {
    for (std::size_t l = 0; l < kLastNames.size(); ++l) names.emplace_back(f, l);
  }
  rng.shuffle(std::span<std::pair<std::size_t, std::size_t>>(names));

  for (std::size_t e = 0; e < options.entities; ++e) {
    Entity entity;
    char id[32];
    std::snprintf(id, sizeof(id), "E%04zu", e);
    entity.id = id;
    const std::string first(kFirstNames[names[e].first]);
    const std::string last(kLastNames[names[e].second]);
    entity.name = first + " " + last;
    if (rng.unit() < options.alias_rate) entity.aliases.push_back(last);

    const std::size_t lo = std::min(options.min_relations_per_entity, options.relations);
    const std::size_t hi = std::min(options.max_relations_per_entity, options.relations);
    const std::size_t k = lo + rng.index(hi - lo + 1);
    std::vector<std::size_t> order(options.relations);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<std::string> sentences;
    sentences.push_back(entity.name + " is a " + pick(kDescriptors, rng) + " of some renown.");
    bool has_year = false;
    std::set<std::string> used_values;
    std::size_t chosen = 0;
    for (std::size_t idx : order) {
      if (chosen == k) break;
      const auto& spec = specs[idx];
      // At most one year-valued relation per person.
      if (spec.year && has_year) continue;
      has_year = has_year || spec.year;
      ++chosen;

      std::string value;
      for (int attempt = 0; attempt < 20; ++attempt) {
        value = spec.year ? std::to_string(1850 + rng.index(140)) : pick(*spec.values, rng);
        if (!used_values.count(value)) break;
      }
      used_values.insert(value);
      corpus.facts.push_back({std::string(spec.id), entity.id, value});
      if (rng.unit() < options.unaligned_fact_rate) continue;  // fact never surfaces in text

      const bool use_alias = !entity.aliases.empty() && rng.unit() < 0.5;
      const std::string mention = use_alias ? entity.aliases.front() : entity.name;
      std::string sentence = fill(spec.patterns[rng.index(spec.patterns.size())], mention, value);
      if (rng.unit() < options.distractor_rate) {
        std::string lead(kDistractorLeads[rng.index(kDistractorLeads.size())]);
        for (auto at = lead.find("{d}"); at != std::string::npos; at = lead.find("{d}")) {
          lead.replace(at, 3, pick(kDistractors, rng));
        }
        if (sentence.compare(0, mention.size(), mention) != 0) {
          sentence[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sentence[0])));
        }
        sentence = lead + sentence;
      }
      sentences.push_back(std::move(sentence));
    }
    std::vector<std::string> body(sentences.begin() + 1, sentences.end());
    rng.shuffle(std::span<std::string>(body));
    std::copy(body.begin(), body.end(), sentences.begin() + 1);
    sentences.push_back(entity.name + " is remembered fondly by many.");

    std::string text = join(sentences, " ");
    corpus.documents.push_back(make_document(entity.id, text));
    corpus.entities.push_back(std::move(entity));
  }
  return corpus;
}

}  // namespace slotshot
