#include "wood/corpus.hpp"

#include <fstream>

#include "doctest.h"
#include "support.hpp"
#include "wood/error.hpp"
#include "wood/util.hpp"

using namespace wood;
using support::TempDir;

namespace {

std::filesystem::path write(const TempDir& dir, const std::string& name,
                            const std::string& content) {
  const auto path = dir / name;
  write_file(path, content);
  return path;
}

}  // namespace

TEST_CASE("load_corpus parses JSONL and infers num_classes") {
  TempDir dir;
  const auto path = write(dir, "c.jsonl",
                          R"({"id":"a","text":"good movie","label":0})"
                          "\n"
                          R"({"id":"b","text":"bad movie","label":1})"
                          "\n");
  const Corpus c = load_corpus(path, CorpusFormat::jsonl, CorpusRole::train);
  REQUIRE(c.size() == 2);
  CHECK(c.num_classes == 2);
  CHECK(c.samples[0].id == "a");
  CHECK(c.samples[1].label == 1);
  CHECK(c.role == CorpusRole::train);
  CHECK(c.contains("b"));
  CHECK_FALSE(c.contains("z"));
  CHECK(c.at("a").text == "good movie");
  CHECK_THROWS_AS((void)c.at("z"), ValidationError);
}

TEST_CASE("load_corpus rejects duplicates, bad records and empty files") {
  TempDir dir;
  CHECK_THROWS_AS(load_corpus(write(dir, "dup.jsonl",
                                    R"({"id":"a","text":"x","label":0})"
                                    "\n"
                                    R"({"id":"a","text":"y","label":0})"
                                    "\n"),
                              CorpusFormat::jsonl, CorpusRole::train),
                  ValidationError);
  CHECK_THROWS_AS(load_corpus(write(dir, "empty.jsonl", ""),
                              CorpusFormat::jsonl, CorpusRole::train),
                  ValidationError);
  CHECK_THROWS_AS(load_corpus(write(dir, "nofield.jsonl",
                                    R"({"id":"a","label":0})"
                                    "\n"),
                              CorpusFormat::jsonl, CorpusRole::train),
                  ValidationError);
  CHECK_THROWS_AS(load_corpus(write(dir, "neg.jsonl",
                                    R"({"id":"a","text":"x","label":-1})"
                                    "\n"),
                              CorpusFormat::jsonl, CorpusRole::train),
                  ValidationError);
  CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl", CorpusFormat::jsonl,
                              CorpusRole::train),
                  IoError);

  // parse errors carry the line number
  try {
    load_corpus(write(dir, "bad.jsonl",
                      R"({"id":"a","text":"x","label":0})"
                      "\nnot json\n"),
                CorpusFormat::jsonl, CorpusRole::train);
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("load_corpus parses CSV with a mandatory header") {
  TempDir dir;
  const auto path = write(dir, "c.csv",
                          "id,text,label\n"
                          "a,\"good, movie\",0\n"
                          "b,bad,1\n");
  const Corpus c = load_corpus(path, CorpusFormat::csv, CorpusRole::test);
  REQUIRE(c.size() == 2);
  CHECK(c.samples[0].text == "good, movie");
  CHECK(c.num_classes == 2);

  CHECK_THROWS_AS(load_corpus(write(dir, "h.csv", "sid,text,label\na,x,0\n"),
                              CorpusFormat::csv, CorpusRole::test),
                  ValidationError);
  CHECK_THROWS_AS(load_corpus(write(dir, "l.csv", "id,text,label\na,x,zero\n"),
                              CorpusFormat::csv, CorpusRole::test),
                  ValidationError);
}

TEST_CASE("manifest declares num_classes and label names") {
  TempDir dir;
  const auto path = write(dir, "c.jsonl",
                          R"({"id":"a","text":"x","label":0})"
                          "\n");
  write(dir, "c.manifest.json",
        R"({"num_classes":5,"label_names":["n0","n1","n2","n3","n4"]})");
  const Corpus c = load_corpus(path, CorpusFormat::jsonl, CorpusRole::train);
  CHECK(c.num_classes == 5);  // sidecar auto-detected
  CHECK(c.label_names.size() == 5);

  // label outside the declared range
  const auto bad = write(dir, "bad.jsonl",
                         R"({"id":"a","text":"x","label":7})"
                         "\n");
  write(dir, "bad.manifest.json", R"({"num_classes":2})");
  CHECK_THROWS_AS(load_corpus(bad, CorpusFormat::jsonl, CorpusRole::train),
                  ValidationError);

  // explicit manifest path beats the sidecar convention
  CorpusLoadOptions options;
  options.manifest = dir / "c.manifest.json";
  const auto plain = write(dir, "p.jsonl",
                           R"({"id":"a","text":"x","label":0})"
                           "\n");
  CHECK(load_corpus(plain, CorpusFormat::jsonl, CorpusRole::train, options)
            .num_classes == 5);
}

TEST_CASE("empty text needs the allow-empty flag") {
  TempDir dir;
  const auto path = write(dir, "c.jsonl",
                          R"({"id":"a","text":"","label":0})"
                          "\n");
  CHECK_THROWS_AS(load_corpus(path, CorpusFormat::jsonl, CorpusRole::train),
                  ValidationError);
  CorpusLoadOptions options;
  options.allow_empty_text = true;
  CHECK(load_corpus(path, CorpusFormat::jsonl, CorpusRole::train, options)
            .size() == 1);
}

TEST_CASE("save_corpus round-trips field for field") {
  TempDir dir;
  const Corpus c = support::make_corpus(
      CorpusRole::test, {"plain", "comma, \"quote\"", "uni\xC3\xA9"},
      {0, 1, 2});
  const auto path = dir / "out.jsonl";
  save_corpus(c, path);
  const Corpus back = load_corpus(path, CorpusFormat::jsonl, CorpusRole::test);
  REQUIRE(back.size() == c.size());
  CHECK(back.samples == c.samples);
  CHECK(back.num_classes == c.num_classes);
  CHECK(back.content_digest() == c.content_digest());
}

TEST_CASE("corpus_format_from_path and digests") {
  CHECK(corpus_format_from_path("x.csv") == CorpusFormat::csv);
  CHECK(corpus_format_from_path("x.jsonl") == CorpusFormat::jsonl);
  CHECK(corpus_format_from_path("x") == CorpusFormat::jsonl);

  Corpus a = support::make_corpus(CorpusRole::train, {"one", "two"});
  Corpus b = support::make_corpus(CorpusRole::train, {"one", "two!"});
  CHECK(a.ids_digest() == b.ids_digest());
  CHECK(a.content_digest() != b.content_digest());
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(std::vector<double>{0.4, 0.4, 0.2}) == 0);
  CHECK(argmax(std::vector<double>{0.1, 0.2, 0.7}) == 2);
  CHECK_THROWS_AS(argmax(std::vector<double>{}), ValidationError);
}

TEST_CASE("validate_record enforces the prediction invariants") {
  PredictionRecord rec{"a", 0, {0.7, 0.3}};
  CHECK_NOTHROW(validate_record(rec, 2));
  CHECK(rec.confidence() == doctest::Approx(0.7));

  CHECK_THROWS_AS(validate_record({"a", 0, {0.7, 0.2, 0.1}}, 2),
                  ValidationError);  // wrong length
  CHECK_THROWS_AS(validate_record({"a", 0, {0.6, 0.6}}, 2),
                  ValidationError);  // sum off
  CHECK_THROWS_AS(validate_record({"a", 1, {0.7, 0.3}}, 2),
                  ValidationError);  // argmax mismatch
  CHECK_THROWS_AS(validate_record({"a", 0, {1.2, -0.2}}, 2),
                  ValidationError);  // out of range
  // tie: lowest index wins
  CHECK_THROWS_AS(validate_record({"a", 1, {0.5, 0.5}}, 2), ValidationError);
  CHECK_NOTHROW(validate_record({"a", 0, {0.5, 0.5}}, 2));
}

TEST_CASE("load_predictions validates every record against the corpus") {
  TempDir dir;
  const Corpus test =
      support::make_corpus(CorpusRole::test, {"x", "y"}, {0, 1});
  const auto good = write(
      dir, "model.jsonl",
      R"({"id":"s0","predicted_label":0,"probabilities":[0.7,0.3]})"
      "\n"
      R"({"id":"s1","predicted_label":1,"probabilities":[0.2,0.8]})"
      "\n");
  const PredictionSet preds = load_predictions(good, test);
  CHECK(preds.model_name == "model");  // file stem
  REQUIRE(preds.records.size() == 2);
  CHECK(preds.records.at("s1").predicted_label == 1);

  CHECK(load_predictions(good, test, "override").model_name == "override");

  const Corpus train = support::make_corpus(CorpusRole::train, {"x"});
  CHECK_THROWS_AS(load_predictions(good, train), ValidationError);

  CHECK_THROWS_AS(
      load_predictions(
          write(dir, "sum.jsonl",
                R"({"id":"s0","predicted_label":0,"probabilities":[0.6,0.6]})"
                "\n"
                R"({"id":"s1","predicted_label":1,"probabilities":[0.2,0.8]})"
                "\n"),
          test),
      ValidationError);

  CHECK_THROWS_AS(
      load_predictions(
          write(dir, "unk.jsonl",
                R"({"id":"zz","predicted_label":0,"probabilities":[0.7,0.3]})"
                "\n"),
          test),
      ValidationError);

  CHECK_THROWS_AS(
      load_predictions(
          write(dir, "dup.jsonl",
                R"({"id":"s0","predicted_label":0,"probabilities":[0.7,0.3]})"
                "\n"
                R"({"id":"s0","predicted_label":0,"probabilities":[0.7,0.3]})"
                "\n"),
          test),
      ValidationError);

  // the first missing id is named
  try {
    load_predictions(
        write(dir, "miss.jsonl",
              R"({"id":"s1","predicted_label":1,"probabilities":[0.2,0.8]})"
              "\n"),
        test);
    FAIL("expected a missing-prediction error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("s0") != std::string::npos);
  }
}

TEST_CASE("save_predictions round-trips") {
  TempDir dir;
  const Corpus test =
      support::make_corpus(CorpusRole::test, {"x", "y"}, {0, 1});
  const PredictionSet preds =
      support::make_predictions(test, {1, 0}, 0.75, "bow");
  const auto path = dir / "bow.jsonl";
  save_predictions(preds, path);
  const PredictionSet back = load_predictions(path, test);
  CHECK(back.model_name == "bow");
  CHECK(back.records == preds.records);
}

TEST_CASE("validate_alignment reports missing and extra ids") {
  const Corpus test =
      support::make_corpus(CorpusRole::test, {"x", "y"}, {0, 1});
  PredictionSet preds = support::make_predictions(test, {0, 1});
  CHECK(validate_alignment(test, preds).aligned());

  PredictionSet missing = preds;
  missing.records.erase("s1");
  const AlignmentReport r1 = validate_alignment(test, missing);
  REQUIRE(r1.missing.size() == 1);
  CHECK(r1.missing[0] == "s1");
  CHECK(r1.extra.empty());

  PredictionSet extra = preds;
  extra.records.emplace("z", PredictionRecord{"z", 0, {0.9, 0.1}});
  const AlignmentReport r2 = validate_alignment(test, extra);
  REQUIRE(r2.extra.size() == 1);
  CHECK(r2.extra[0] == "z");
}
