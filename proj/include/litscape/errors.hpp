#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace litscape {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A line in a line-oriented input could not be parsed.
class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line_no, std::string reason)
      : Error("line " + std::to_string(line_no) + ": " + reason),
        line_no_(line_no),
        reason_(std::move(reason)) {}

  std::size_t line_no() const { return line_no_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_no_;
  std::string reason_;
};

class DuplicateDocId : public Error {
 public:
  explicit DuplicateDocId(std::string doc_id)
      : Error("duplicate document id '" + doc_id + "'"), doc_id_(std::move(doc_id)) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

class UnknownCategory : public Error {
 public:
  explicit UnknownCategory(std::string label)
      : Error("unknown category label '" + label + "'"), label_(std::move(label)) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class BadDate : public Error {
 public:
  explicit BadDate(std::string value)
      : Error("bad date '" + value + "'"), value_(std::move(value)) {}
  const std::string& value() const { return value_; }

 private:
  std::string value_;
};

class DuplicateEntryTerm : public Error {
 public:
  DuplicateEntryTerm(std::string term, std::string heading_a, std::string heading_b)
      : Error("entry term '" + term + "' claimed by both " + heading_a + " and " + heading_b),
        term_(std::move(term)),
        heading_a_(std::move(heading_a)),
        heading_b_(std::move(heading_b)) {}
  const std::string& term() const { return term_; }
  const std::string& heading_a() const { return heading_a_; }
  const std::string& heading_b() const { return heading_b_; }

 private:
  std::string term_, heading_a_, heading_b_;
};

class EmptyLexicon : public Error {
 public:
  EmptyLexicon() : Error("lexicon has no headings") {}
};

class DegenerateSample : public Error {
 public:
  DegenerateSample() : Error("sample size must be at least 1") {}
};

class UnknownKey : public Error {
 public:
  explicit UnknownKey(const std::string& what) : Error("unknown entity key " + what) {}
};

class EmptyVocabulary : public Error {
 public:
  EmptyVocabulary() : Error("term vocabulary is empty") {}
};

class NoDatedDocuments : public Error {
 public:
  NoDatedDocuments() : Error("topic has no dated documents among its top-ranked documents") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class MissingStage : public Error {
 public:
  explicit MissingStage(const std::string& kind)
      : Error("plot data '" + kind + "' requires a stage that did not run") {}
};

}  // namespace litscape
