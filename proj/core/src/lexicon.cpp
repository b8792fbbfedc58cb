#include "topiceval/lexicon.hpp"

#include <stdexcept>

#include "topiceval/text.hpp"

namespace topiceval {

namespace {

constexpr std::string_view kBuiltinPairs[][2] = {
    {"christmas", "xmas"}, {"television", "tv"}, {"automobile", "car"}, {"car", "auto"},
    {"mathematics", "math"}, {"mathematics", "maths"}, {"laboratory", "lab"}, {"photograph", "photo"},
    {"telephone", "phone"}, {"refrigerator", "fridge"}, {"advertisement", "ad"}, {"advertisement", "advert"},
    {"application", "app"}, {"information", "info"}, {"examination", "exam"}, {"gymnasium", "gym"},
    {"influenza", "flu"}, {"professor", "prof"}, {"university", "uni"}, {"bicycle", "bike"},
    {"microphone", "mic"}, {"veterinarian", "vet"}, {"statistics", "stats"}, {"representative", "rep"},
    {"government", "govt"}, {"department", "dept"}, {"corporation", "corp"}, {"company", "co"},
    {"international", "intl"}, {"association", "assn"}, {"approximately", "approx"}, {"number", "num"},
    {"reference", "ref"}, {"temperature", "temp"}, {"maximum", "max"}, {"minimum", "min"},
    {"administrator", "admin"}, {"administration", "admin"}, {"documentation", "docs"}, {"document", "doc"},
    {"specification", "spec"}, {"configuration", "config"}, {"directory", "dir"}, {"message", "msg"},
    {"password", "pwd"}, {"program", "prog"}, {"software", "sw"}, {"hardware", "hw"},
    {"monitor", "display"}, {"computer", "pc"}, {"processor", "cpu"}, {"memory", "ram"},
    {"internet", "net"}, {"website", "site"}, {"email", "mail"}, {"e-mail", "email"},
    {"president", "prez"}, {"senator", "sen"}, {"congress", "congressional"}, {"legislation", "law"},
    {"attorney", "lawyer"}, {"physician", "doctor"}, {"doctor", "dr"}, {"medicine", "medication"},
    {"hospital", "clinic"}, {"illness", "sickness"}, {"disease", "illness"}, {"pain", "ache"},
    {"baby", "infant"}, {"child", "kid"}, {"children", "kids"}, {"mother", "mom"},
    {"father", "dad"}, {"grandmother", "grandma"}, {"grandfather", "grandpa"}, {"friend", "pal"},
    {"buy", "purchase"}, {"sell", "vend"}, {"begin", "start"}, {"end", "finish"},
    {"big", "large"}, {"small", "little"}, {"fast", "quick"}, {"happy", "glad"},
    {"sad", "unhappy"}, {"angry", "mad"}, {"smart", "intelligent"}, {"hard", "difficult"},
    {"easy", "simple"}, {"rich", "wealthy"}, {"poor", "impoverished"}, {"old", "elderly"},
    {"help", "assist"}, {"assistance", "aid"}, {"answer", "reply"}, {"ask", "inquire"},
    {"show", "display"}, {"fix", "repair"}, {"shut", "close"}, {"choose", "select"},
    {"gift", "present"}, {"money", "cash"}, {"dollar", "buck"}, {"price", "cost"},
    {"job", "occupation"}, {"work", "labor"}, {"employee", "worker"}, {"boss", "manager"},
    {"salary", "wage"}, {"vacation", "holiday"}, {"trip", "journey"}, {"road", "street"},
    {"airplane", "plane"}, {"aircraft", "plane"}, {"aeroplane", "airplane"}, {"ship", "vessel"},
    {"boat", "vessel"}, {"truck", "lorry"}, {"gasoline", "gas"}, {"petrol", "gasoline"},
    {"apartment", "flat"}, {"house", "home"}, {"sofa", "couch"}, {"garbage", "trash"},
    {"rubbish", "garbage"}, {"movie", "film"}, {"cinema", "movies"}, {"song", "tune"},
    {"music", "tunes"}, {"football", "soccer"}, {"athlete", "sportsman"}, {"team", "squad"},
    {"game", "match"}, {"victory", "win"}, {"defeat", "loss"}, {"score", "points"},
    {"pray", "prayer"}, {"god", "deity"}, {"bible", "scripture"}, {"church", "chapel"},
    {"faith", "belief"}, {"religion", "faith"}, {"holy", "sacred"}, {"christ", "jesus"},
    {"atheist", "nonbeliever"}, {"weapon", "arm"}, {"firearm", "gun"}, {"rifle", "gun"},
    {"pistol", "handgun"}, {"murder", "homicide"}, {"crime", "offense"}, {"police", "cops"},
    {"officer", "cop"}, {"prison", "jail"}, {"judge", "justice"}, {"court", "tribunal"},
    {"war", "conflict"}, {"army", "military"}, {"soldier", "troop"}, {"country", "nation"},
    {"state", "nation"}, {"america", "usa"}, {"united", "us"}, {"britain", "uk"},
    {"israel", "israeli"}, {"arab", "arabic"}, {"jewish", "jew"}, {"muslim", "moslem"},
    {"space", "cosmos"}, {"rocket", "missile"}, {"satellite", "sat"}, {"planet", "world"},
    {"earth", "world"}, {"orbit", "orbital"}, {"nasa", "agency"}, {"astronaut", "cosmonaut"},
    {"encryption", "crypto"}, {"cryptography", "crypto"}, {"key", "cipher"}, {"chip", "microchip"},
    {"security", "protection"}, {"privacy", "confidentiality"}, {"graphics", "gfx"}, {"image", "picture"},
    {"picture", "pic"}, {"windows", "win"}, {"driver", "drv"}, {"drive", "disk"},
    {"disk", "disc"}, {"printer", "printing"}, {"deskjet", "inkjet"}, {"keyboard", "kbd"},
    {"motorcycle", "motorbike"}, {"motorbike", "bike"}, {"helmet", "headgear"}, {"engine", "motor"},
    {"hockey", "nhl"}, {"baseball", "mlb"}, {"basketball", "nba"}, {"pitcher", "hurler"},
    {"farm", "ranch"}, {"farmer", "grower"}, {"crop", "harvest"}, {"agriculture", "farming"},
    {"fertilizer", "manure"}, {"soil", "earth"}, {"water", "h2o"}, {"irrigation", "watering"},
    {"livestock", "cattle"}, {"cow", "cattle"}, {"pig", "hog"}, {"chicken", "poultry"},
    {"corn", "maize"}, {"grain", "cereal"}, {"rice", "paddy"}, {"forest", "woodland"},
    {"climate", "weather"}, {"pollution", "contamination"}, {"environment", "ecosystem"}, {"energy", "power"},
    {"solar", "photovoltaic"}, {"electricity", "power"}, {"fuel", "gas"}, {"oil", "petroleum"},
    {"food", "nutrition"}, {"meal", "dinner"}, {"restaurant", "eatery"}, {"drink", "beverage"},
    {"soda", "pop"}, {"coffee", "java"}, {"love", "affection"}, {"lol", "laugh"},
    {"thanks", "thx"}, {"please", "pls"}, {"tomorrow", "tmrw"}, {"tonight", "tonite"},
    {"birthday", "bday"}, {"weekend", "wknd"}, {"people", "folks"}, {"awesome", "great"},
    {"beautiful", "pretty"}, {"student", "pupil"}, {"school", "academy"}, {"teacher", "instructor"},
    {"research", "study"}, {"science", "scientific"}, {"data", "dataset"}, {"analysis", "analytics"},
};

}  // namespace

SynonymLexicon SynonymLexicon::builtin() {
  SynonymLexicon lex;
  for (const auto& pair : kBuiltinPairs) lex.add(pair[0], pair[1]);
  return lex;
}

void SynonymLexicon::add(std::string_view a, std::string_view b) {
  auto fa = fold_case(trim(a));
  auto fb = fold_case(trim(b));
  if (fa.empty() || fb.empty() || fa == fb) return;
  table_[fa].insert(fb);
  table_[fb].insert(fa);
}

void SynonymLexicon::merge_text(std::string_view text) {
  for (const auto& raw : split_lines(text)) {
    auto line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    auto sep = line.find('\t');
    if (sep == std::string_view::npos) sep = line.find(':');
    if (sep == std::string_view::npos) {
      throw std::invalid_argument("lexicon line without separator: '" + std::string(line) + "'");
    }
    const auto head = line.substr(0, sep);
    for (const auto& alt : split(line.substr(sep + 1), ',')) add(head, alt);
  }
}

void SynonymLexicon::merge_file(const std::string& path) { merge_text(read_file(path)); }

std::vector<std::string> SynonymLexicon::alternatives(std::string_view word) const {
  auto it = table_.find(fold_case(word));
  if (it == table_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

bool SynonymLexicon::same_concept(std::string_view a, std::string_view b) const {
  auto it = table_.find(fold_case(a));
  return it != table_.end() && it->second.contains(fold_case(b));
}

std::size_t SynonymLexicon::pair_count() const {
  std::size_t n = 0;
  for (const auto& [_, alts] : table_) n += alts.size();
  return n / 2;
}

}  // namespace topiceval
