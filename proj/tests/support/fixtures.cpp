// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <random>

namespace progcheck::testing {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("progcheck-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> snapshot_tree(const fs::path& dir, const std::vector<std::string>& skip) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    fs::path rel = fs::relative(entry.path(), dir);
    if (std::find(skip.begin(), skip.end(), rel.begin()->string()) != skip.end()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    out[rel.generic_string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

Bm25Fixture bm25_fixture(std::size_t n_docs, std::size_t n_queries, std::uint32_t seed) {
  static const std::vector<std::string> vocab = {
      "river",  "mountain", "castle", "harbor",  "forest", "bridge", "valley",  "tower",  "island", "market",
      "temple", "garden",   "canal",  "lake",    "desert", "glacier", "village", "mill",   "mine",   "abbey",
      "north",  "south",    "east",   "west",    "old",    "new",    "great",   "little", "upper",  "lower",
      "built",  "founded",  "ruled",  "crossed", "named",  "burned", "rebuilt", "traded", "mapped", "sold",
      "king",   "queen",    "duke",   "monk",    "sailor", "miller", "painter", "poet",   "judge",  "smith",
      "1204",   "1350",     "1492",   "1688",    "1815",   "stone",  "iron",    "salt",   "wool",   "amber"};
  std::mt19937 rng(seed);
  // Skewed word choice so document frequencies vary widely.
  std::vector<double> weights;
  for (std::size_t i = 0; i < vocab.size(); ++i) weights.push_back(1.0 / static_cast<double>(i + 1));
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_int_distribution<int> len(3, 40);

  Bm25Fixture f;
  for (std::size_t d = 0; d < n_docs; ++d) {
    Document doc;
    doc.doc_id = "doc-" + std::to_string(1000 + d);
    doc.title = vocab[pick(rng)] + " " + vocab[pick(rng)];
    int n = len(rng);
    for (int w = 0; w < n; ++w) {
      std::string word = vocab[pick(rng)];
      if (w % 7 == 0) word[0] = static_cast<char>(word[0] - ('a' <= word[0] && word[0] <= 'z' ? 32 : 0));
      doc.text += word;
      doc.text += (w % 5 == 4) ? ". " : " ";
    }
    f.docs.push_back(std::move(doc));
  }
  std::uniform_int_distribution<int> qlen(1, 5);
  for (std::size_t q = 0; q < n_queries; ++q) {
    std::string query;
    int n = qlen(rng);
    for (int w = 0; w < n; ++w) query += vocab[pick(rng)] + (w + 1 < n ? " " : "");
    if (q == 3) query += " zeppelin";       // term absent from the corpus
    if (q == 5) query += " " + query;       // repeated terms
    if (q == 8) query = "What about the " + query + "?";
    f.queries.push_back(query);
  }
  return f;
}

namespace {

const std::vector<std::string> kFirst = {"Alder",  "Brisa",  "Corvin", "Delmar",  "Elowen", "Fennick", "Garrow",
                                         "Hesper", "Ildra",  "Jorvik", "Kestrel", "Lunet",  "Marrow",  "Nyssa",
                                         "Orrin",  "Pellam", "Quillon", "Rovena", "Sorrel", "Tamsin"};
const std::vector<std::string> kLast = {"Vantreck",  "Oakhollow",  "Brinemoor", "Castellane", "Duskwater",
                                        "Emberly",   "Fallowmere", "Greythorn", "Hollingsby", "Ironvale",
                                        "Juniperra", "Kettleby",   "Larkspur",  "Mirefield",  "Northcott",
                                        "Oldcastle", "Pinebrook",  "Quarrington", "Ravensby", "Stormholt"};
const std::vector<std::string> kTowns = {"Zelvar",  "Yorrin",   "Xanthe",  "Wexbury", "Vellmoor", "Ulvaston", "Tressock",
                                         "Sarnby",  "Rookhithe", "Quenmere", "Pollock", "Ombry",   "Nettlecombe",
                                         "Marlow",  "Lindqvist", "Kirrwood", "Jessop",  "Halvard", "Greshin", "Farrowdale"};
const std::vector<std::string> kRegions = {"Ardenne", "Brumal", "Cindral", "Dorran", "Esker"};

std::string py_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ToyWorld toy_world(std::size_t n_claims, std::size_t n_docs) {
  ToyWorld w;
  for (std::size_t i = 0; i < n_claims; ++i) {
    const std::string person = kFirst[i % kFirst.size()] + " " + kLast[i % kLast.size()];
    const std::string town = kTowns[i % kTowns.size()];
    w.docs.push_back({"bio-" + std::to_string(i), person,
                      person + " is a cartographer who was born in " + town + " and later moved abroad."});
    w.docs.push_back({"town-" + std::to_string(i), town,
                      town + " is a market town located in the " + kRegions[i % kRegions.size()] + " region."});
  }
  for (std::size_t j = 0; w.docs.size() < n_docs; ++j) {
    w.docs.push_back({"misc-" + std::to_string(j), "Archive note " + std::to_string(j),
                      "The archive records weather, harvest yields and a market fair held in spring."});
  }

  for (std::size_t i = 0; i < n_claims; ++i) {
    ToyClaim c;
    const std::string person = kFirst[i % kFirst.size()] + " " + kLast[i % kLast.size()];
    const std::string town = kTowns[i % kTowns.size()];
    c.id = "toy-" + std::to_string(i);
    c.label = i % 2 == 0;
    const std::string region = kRegions[(i + (c.label ? 0 : 2)) % kRegions.size()];
    c.claim = person + " was born in a town in the " + region + " region.";
    c.hops = i % 4 < 2 ? 2 : 3;
    c.gold_doc_ids = {"bio-" + std::to_string(i), "town-" + std::to_string(i)};
    c.question = "Where was " + person + " born?";
    c.answer = town;
    c.program = "Here is the program.\n```python\n"
                "# Find where the person was born.\n"
                "evidence_1 = retrieve(" + py_quote(person + " born") + ")\n"
                "birthplace = question(" + py_quote(c.question) + ", evidence_1)\n"
                "# Then the region of that town.\n"
                "evidence_2 = retrieve(f\"{birthplace} town region\")\n"
                "final_prediction = verify(" + py_quote(c.claim) + ", evidence_1 + \"\\n\" + evidence_2)\n"
                "```\n";
    w.claims.push_back(std::move(c));
  }
  return w;
}

ToyStack::ToyStack(const ToyWorld& world, std::shared_ptr<const Backend> backend, std::size_t top_k)
    : index(Bm25Index::build(world.docs, RetrievalConfig{})),
      gateway(GatewayConfig{},
              backend ? std::move(backend) : std::make_shared<ScriptedBackend>(ScriptedBackend::from_json(world.rules()))),
      functions(index, gateway, top_k),
      executor(functions, gateway) {}

std::vector<AnnotatedClaim> annotated(const ToyWorld& world) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : world.docs) by_id[d.doc_id] = &d;
  std::vector<AnnotatedClaim> out;
  for (const auto& c : world.claims) {
    AnnotatedClaim a{c.id, c.claim, c.label, {}};
    for (const auto& id : c.gold_doc_ids) {
      auto it = by_id.find(id);
      a.gold_evidence.push_back(it == by_id.end() ? id : it->second->title + ": " + it->second->text);
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::string toy_critique_response() {
  return "## **1. Reconstruct the Ground-Truth Reasoning Path**\n"
         "Find the birthplace first, then the region that town belongs to.\n"
         "---\n"
         "## **2. Identify Errors in Decomposition**\n"
         "<error_label>bridging fact missing</error_label>\n"
         "## **3. Identify Issues in Retrieval & Information Gathering**\n"
         "<error_label>suboptimal query format</error_label>\n"
         "## **4. Suggest Refinements for Improvement**\n"
         "<suggestions>\n"
         "  <decomposition>\n"
         "    - Resolve the bridging entity before checking its properties.\n"
         "  </decomposition>\n"
         "  <information_gathering>\n"
         "    no suggestions\n"
         "  </information_gathering>\n"
         "</suggestions>\n";
}

std::string toy_refine_response() {
  return "<refined_prompt>\n"
         "  <decomposition>\n"
         "    Identify any bridging entity first, then verify each property of it as its own sub-claim.\n"
         "  </decomposition>\n"
         "  <information_gathering>\n"
         "    remain unchanged\n"
         "  </information_gathering>\n"
         "</refined_prompt>\n";
}

json ToyWorld::rules() const {
  json rules = json::array();
  for (const auto& c : claims) {
    rules.push_back({{"role", "generator"},
                     {"contains", "# Input Claim:\n```\n" + c.claim + "\n```"},
                     {"response", c.program}});
    rules.push_back({{"role", "function_llm"},
                     {"contains", "Claim: " + c.claim + "\n"},
                     {"response", std::string("Reasoning: The evidence settles it.\nVerification Result: ") +
                                      (c.label ? "True" : "False")}});
    rules.push_back({{"role", "function_llm"},
                     {"contains", "Question: " + c.question + "\n"},
                     {"response", "Answer: " + c.answer}});
  }
  rules.push_back({{"role", "optimizer"}, {"contains", "structured critique"}, {"response", toy_critique_response()}});
  rules.push_back({{"role", "optimizer"}, {"contains", "Your task is to refine"}, {"response", toy_refine_response()}});
  return {{"rules", rules}, {"fallback", "no rule matched"}};
}

void ToyWorld::write(const fs::path& dir) const {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
    for (const auto& d : docs) out << json{{"id", d.doc_id}, {"title", d.title}, {"text", d.text}}.dump() << '\n';
  }
  {
    std::ofstream out(dir / "dataset.jsonl", std::ios::binary);
    for (const auto& c : claims) {
      out << json{{"id", c.id},
                  {"claim", c.claim},
                  {"label", c.label ? "SUPPORTED" : "NOT_SUPPORTED"},
                  {"num_hops", c.hops},
                  {"gold_doc_ids", c.gold_doc_ids}}
                 .dump()
          << '\n';
    }
  }
  std::ofstream(dir / "rules.json", std::ios::binary) << rules().dump(2) << '\n';
}

std::vector<std::string> program_corpus() {
  return {
      // 1: single verify
      "final_prediction = verify(\"The sky is blue.\", retrieve(\"sky colour\"))\n",
      // 2: two-hop with f-string
      "evidence = retrieve(\"Zorbak river\")\n"
      "country = question(\"Which country is Zorbak in?\", evidence)\n"
      "evidence_2 = retrieve(f\"{country} capital\")\n"
      "final_prediction = verify(\"Zorbak is in a country whose capital is Ulm.\", evidence + \"\\n\" + evidence_2)\n",
      // 3: conjunction of sub-claims
      "ev1 = retrieve(\"Ada Lovelace\")\n"
      "ev2 = retrieve(\"Analytical Engine\")\n"
      "c1 = verify(\"Ada Lovelace wrote notes on the Analytical Engine.\", ev1)\n"
      "c2 = verify(\"The Analytical Engine was designed by Babbage.\", ev2)\n"
      "final_prediction = c1 and c2\n",
      // 4: disjunction and negation
      "e = retrieve(\"Mount Kazbek\")\n"
      "a = verify(\"Kazbek is in Georgia.\", e)\n"
      "b = verify(\"Kazbek is in Russia.\", e)\n"
      "final_prediction = a or not b\n",
      // 5: comments everywhere
      "# Step 1: gather evidence\n"
      "evidence = retrieve(\"Lake Baikal depth\")  # query\n"
      "# Step 2: decide\n"
      "final_prediction = verify(\"Lake Baikal is the deepest lake.\", evidence)  # verdict\n",
      // 6: single-quoted strings and escapes
      "e = retrieve('O\\'Brien novel')\n"
      "final_prediction = verify('Flann O\\'Brien wrote \"The Third Policeman\".', e)\n",
      // 7: nested calls
      "final_prediction = verify(\"X won the prize.\", retrieve(question(\"Who won the prize?\", retrieve(\"prize winner 1999\"))))\n",
      // 8: parenthesised precedence
      "e = retrieve(\"a\")\n"
      "p = verify(\"a\", e)\n"
      "q = verify(\"b\", e)\n"
      "r = verify(\"c\", e)\n"
      "final_prediction = (p or q) and r\n",
      // 9: not of a group
      "e = retrieve(\"a\")\n"
      "p = verify(\"a\", e)\n"
      "q = verify(\"b\", e)\n"
      "final_prediction = not (p and q)\n",
      // 10: boolean literals
      "e = retrieve(\"a\")\n"
      "final_prediction = verify(\"a\", e) and True\n",
      // 11: augmented concatenation
      "evidence = retrieve(\"first\")\n"
      "evidence += \"\\n\" + retrieve(\"second\")\n"
      "final_prediction = verify(\"claim\", evidence)\n",
      // 12: keyword arguments
      "e = retrieve(query=\"Nile length\")\n"
      "ans = question(question=\"How long is the Nile?\", evidence=e)\n"
      "final_prediction = verify(claim=f\"The Nile is {ans}\", evidence=e)\n",
      // 13: implicit line joining inside parentheses
      "e = retrieve(\n"
      "    \"Treaty of Westphalia\"\n"
      ")\n"
      "final_prediction = verify(\n"
      "    \"The treaty was signed in 1648.\",\n"
      "    e,\n"
      ")\n",
      // 14: adjacent literals
      "e = retrieve(\"long \" \"query\")\n"
      "final_prediction = verify(\"a claim\", e)\n",
      // 15: f-string with several placeholders and escaped braces
      "e = retrieve(\"x\")\n"
      "a = question(\"Who?\", e)\n"
      "b = question(\"Where?\", e)\n"
      "final_prediction = verify(f\"{a} lived in {b} {{really}}\", e)\n",
      // 16: three-way or
      "e = retrieve(\"q\")\n"
      "a = verify(\"1\", e)\n"
      "b = verify(\"2\", e)\n"
      "c = verify(\"3\", e)\n"
      "final_prediction = a or b or c\n",
      // 17: mixed and/or without parentheses
      "e = retrieve(\"q\")\n"
      "a = verify(\"1\", e)\n"
      "b = verify(\"2\", e)\n"
      "c = verify(\"3\", e)\n"
      "final_prediction = a and b or c\n",
      // 18: double negation
      "e = retrieve(\"q\")\n"
      "a = verify(\"1\", e)\n"
      "final_prediction = not not a\n",
      // 19: reassignment with the same type
      "e = retrieve(\"first\")\n"
      "e = retrieve(\"second\")\n"
      "final_prediction = verify(\"c\", e)\n",
      // 20: bare expression statement
      "retrieve(\"warm-up\")\n"
      "final_prediction = verify(\"c\", retrieve(\"q\"))\n",
      // 21: backslash continuation
      "e = retrieve(\"a\") + \\\n"
      "    retrieve(\"b\")\n"
      "final_prediction = verify(\"c\", e)\n",
      // 22: unicode text
      "e = retrieve(\"Zürich Hauptbahnhof\")\n"
      "final_prediction = verify(\"Zürich hat einen Hauptbahnhof, eröffnet 1847.\", e)\n",
      // 23: escape sequences
      "e = retrieve(\"tab\\there\")\n"
      "final_prediction = verify(\"line\\nbreak \\\\ slash \\x41 \\u00e9\", e)\n",
      // 24: raw string
      "e = retrieve(r\"C:\\path\\to\")\n"
      "final_prediction = verify(\"c\", e)\n",
      // 25: blank lines and indented comments
      "\n"
      "e = retrieve(\"a\")\n"
      "\n"
      "    # indented comment\n"
      "final_prediction = verify(\"a\", e)\n",
      // 26: four verifies combined
      "e = retrieve(\"q\")\n"
      "v1 = verify(\"1\", e)\n"
      "v2 = verify(\"2\", e)\n"
      "v3 = verify(\"3\", e)\n"
      "v4 = verify(\"4\", e)\n"
      "final_prediction = (v1 or v2) and (v3 or not v4)\n",
      // 27: string concatenation of answers
      "e = retrieve(\"q\")\n"
      "a = question(\"A?\", e)\n"
      "b = question(\"B?\", e)\n"
      "final_prediction = verify(a + \" and \" + b, e)\n",
      // 28: concatenation inside parentheses
      "e = (retrieve(\"a\") + \"\\n\") + retrieve(\"b\")\n"
      "final_prediction = verify(\"c\", e)\n",
      // 29: or of not-groups
      "e = retrieve(\"q\")\n"
      "a = verify(\"1\", e)\n"
      "b = verify(\"2\", e)\n"
      "final_prediction = not a or not (b or a)\n",
      // 30: five calls over two hops
      "# The claim: the director of Titanic was born in Canada.\n"
      "evidence_1 = retrieve(\"Titanic 1997 film director\")\n"
      "director = question(\"Who directed Titanic (1997)?\", evidence_1)\n"
      "evidence_2 = retrieve(f\"{director} birthplace\")\n"
      "born_canada = verify(f\"{director} was born in Canada.\", evidence_2)\n"
      "directed = verify(f\"{director} directed Titanic.\", evidence_1)\n"
      "final_prediction = born_canada and directed\n",
  };
}

std::vector<BadProgram> out_of_grammar_programs() {
  const std::string tail = "final_prediction = verify(\"c\", e)\n";
  return {
      {"for loop", "e = \"\"\nfor q in qs:\n    e = e + retrieve(q)\n" + tail},
      {"while loop", "e = retrieve(\"a\")\nwhile True:\n    e = retrieve(\"b\")\n" + tail},
      {"import", "import os\ne = retrieve(\"a\")\n" + tail},
      {"from import", "from math import pi\ne = retrieve(\"a\")\n" + tail},
      {"def", "def helper(x):\n    return retrieve(x)\ne = helper(\"a\")\n" + tail},
      {"class", "class A:\n    pass\ne = retrieve(\"a\")\n" + tail},
      {"if", "e = retrieve(\"a\")\nif e:\n    e = retrieve(\"b\")\n" + tail},
      {"lambda", "f = lambda x: x\ne = retrieve(\"a\")\n" + tail},
      {"list literal", "qs = [\"a\", \"b\"]\ne = retrieve(\"a\")\n" + tail},
      {"dict literal", "d = {\"a\": 1}\ne = retrieve(\"a\")\n" + tail},
      {"method call", "e = retrieve(\"a\").strip()\n" + tail},
      {"number", "n = 3\ne = retrieve(\"a\")\n" + tail},
      {"comparison", "e = retrieve(\"a\")\nfinal_prediction = question(\"x\", e) == \"yes\"\n"},
      {"subscript", "e = retrieve(\"a\")[0]\n" + tail},
      {"try", "try:\n    e = retrieve(\"a\")\nexcept Exception:\n    e = \"\"\n" + tail},
      {"with", "with open(\"f\") as fh:\n    e = fh.read()\n" + tail},
      {"assert", "e = retrieve(\"a\")\nassert e\n" + tail},
      {"return", "e = retrieve(\"a\")\nreturn e\n"},
      {"None", "e = None\n" + tail},
      {"arithmetic", "e = retrieve(\"a\") * 2\n" + tail},
      {"chained assignment", "a = e = retrieve(\"a\")\n" + tail},
      {"tuple assignment", "a, e = retrieve(\"a\"), retrieve(\"b\")\n" + tail},
      {"unterminated string", "e = retrieve(\"a)\n" + tail},
      {"unbalanced parenthesis", "e = retrieve(\"a\"\n" + tail},
      {"bytes literal", "e = retrieve(b\"a\")\n" + tail},
      {"semicolon", "e = retrieve(\"a\"); x = e\n" + tail},
      {"unknown call", "e = search(\"a\")\n" + tail},
      {"print call", "e = retrieve(\"a\")\nprint(e)\n" + tail},
      {"wrong arity", "e = retrieve(\"a\", \"b\")\n" + tail},
      {"read before assign", tail},
      {"missing final prediction", "e = retrieve(\"a\")\nok = verify(\"c\", e)\n"},
      {"string final prediction", "e = retrieve(\"a\")\nfinal_prediction = question(\"q\", e)\n"},
      {"bool in concatenation", "e = retrieve(\"a\")\nv = verify(\"c\", e)\nfinal_prediction = verify(\"d\", e + v)\n"},
      {"type change", "e = retrieve(\"a\")\ne = verify(\"c\", e)\nfinal_prediction = e\n"},
      {"rebinding a function", "retrieve = \"x\"\ne = retrieve\n" + tail},
      {"two final predictions", "e = retrieve(\"a\")\n" + tail + tail},
      {"unexpected indent", "e = retrieve(\"a\")\n    x = e\n" + tail},
      {"f-string expression", "e = retrieve(\"a\")\nfinal_prediction = verify(f\"{e.upper()}\", e)\n"},
  };
}

std::vector<MalformedCase> malformed_corpus() {
  // Twenty distinct ways a generator reply can be unusable.
  const std::vector<std::string> bad = {
      "I am unable to write a program for this claim.",
      "```python\n```",
      "```python\nevidence = retrieve(\"x\"\nfinal_prediction = verify(\"c\", evidence)\n```",
      "```python\nevidence = search(\"x\")\nfinal_prediction = verify(\"c\", evidence)\n```",
      "```python\nevidence = retrieve(\"x\")\nresult = verify(\"c\", evidence)\n```",
      "```python\nfinal_prediction = verify(\"c\", evidence)\n```",
      "```python\nfor q in [\"a\"]:\n    e = retrieve(q)\nfinal_prediction = True\n```",
      "```python\nevidence = retrieve(\"x\")\nfinal_prediction = question(\"q\", evidence)\n```",
      "```python\nevidence = retrieve(\"x\", \"y\")\nfinal_prediction = verify(\"c\", evidence)\n```",
      "```python\nimport json\nfinal_prediction = verify(\"c\", retrieve(\"x\"))\n```",
      "```python\nevidence = retrieve(\"x\")\nok = verify(\"c\", evidence)\nfinal_prediction = verify(\"c\", evidence + ok)\n```",
      "```python\nevidence = retrieve(\"x\")\nfinal_prediction = len(evidence) > 0\n```",
      "```python\ndef f():\n    return True\nfinal_prediction = f()\n```",
      "```python\nevidence = retrieve(\"x\")\nif evidence:\n    final_prediction = True\n```",
      "```python\nevidence = retrieve(\"x\")\nfinal_prediction = verify(\"c\", evidence)\nfinal_prediction = verify(\"d\", evidence)\n```",
      "```python\nevidence = retrieve(\"x\")\nfinal_prediction = None\n```",
      "```python\nevidence = retrieve('unterminated)\nfinal_prediction = verify(\"c\", evidence)\n```",
      "```python\nevidence = retrieve(\"x\")\nevidence = verify(\"c\", evidence)\nfinal_prediction = evidence\n```",
      "```python\nverify = retrieve(\"x\")\nfinal_prediction = True\n```",
      "   \n\n",
  };
  // Usable replies in the formats generators actually produce.
  auto good = [](std::size_t i) -> std::string {
    const std::string q = "\"topic " + std::to_string(i) + "\"";
    switch (i % 6) {
      case 0:
        return "```python\nevidence = retrieve(" + q + ")\nfinal_prediction = verify(\"claim\", evidence)\n```";
      case 1:
        return "Sure. Here is the reasoning program:\n\n```python\n# check\ne = retrieve(" + q +
               ")\na = question(\"What?\", e)\nfinal_prediction = verify(f\"It is {a}\", e)\n```\nDone.";
      case 2:
        return "e1 = retrieve(" + q + ")\ne2 = retrieve(\"other\")\nfinal_prediction = verify(\"c\", e1) and "
               "verify(\"d\", e2)\n";
      case 3:
        return "```\ne = retrieve(" + q + ")\nfinal_prediction = not verify(\"c\", e)\n```";
      case 4:
        return "```py\ne = retrieve(" + q + ")\nfinal_prediction = verify(\"c\", e) or verify(\"d\", e)\n```";
      default:
        return "```python\n    e = retrieve(" + q + ")\n    final_prediction = verify(\"c\", e)\n```";
    }
  };
  std::vector<MalformedCase> out;
  std::size_t next_bad = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    MalformedCase c;
    c.claim = "Synthetic claim number " + std::to_string(i) + ".";
    if (i % 10 == 7) {
      c.response = bad[next_bad++];
      c.invalid = true;
    } else {
      c.response = good(i);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace progcheck::testing
