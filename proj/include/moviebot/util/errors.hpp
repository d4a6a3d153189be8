#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace moviebot {

// Root of every error thrown by the library. Callers that only need to
// distinguish "ours" from everything else catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MOVIEBOT_DEFINE_ERROR(Name)      \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// dialogue core
MOVIEBOT_DEFINE_ERROR(StateUpdateError);
MOVIEBOT_DEFINE_ERROR(MissingTemplateError);
MOVIEBOT_DEFINE_ERROR(UnresolvedPlaceholderError);
MOVIEBOT_DEFINE_ERROR(VocabularyError);

// nlu
MOVIEBOT_DEFINE_ERROR(EmptySequenceError);
MOVIEBOT_DEFINE_ERROR(InfeasibleConstraintError);
MOVIEBOT_DEFINE_ERROR(InvalidGoldError);
MOVIEBOT_DEFINE_ERROR(EmptyCorpusError);
MOVIEBOT_DEFINE_ERROR(GrammarCoverageError);

// policy
MOVIEBOT_DEFINE_ERROR(DimensionError);
MOVIEBOT_DEFINE_ERROR(ConfigError);
MOVIEBOT_DEFINE_ERROR(NumericalError);

// simulation
MOVIEBOT_DEFINE_ERROR(EmptyCatalogError);
MOVIEBOT_DEFINE_ERROR(InactiveEpisodeError);
MOVIEBOT_DEFINE_ERROR(EmptyListError);

// recsys
MOVIEBOT_DEFINE_ERROR(DuplicateIdError);
MOVIEBOT_DEFINE_ERROR(UnknownUserError);
MOVIEBOT_DEFINE_ERROR(UnknownSessionError);
MOVIEBOT_DEFINE_ERROR(StorageError);

// gateway
MOVIEBOT_DEFINE_ERROR(TerminatedSessionError);
MOVIEBOT_DEFINE_ERROR(BadCredentials);
MOVIEBOT_DEFINE_ERROR(NotAuthenticated);
MOVIEBOT_DEFINE_ERROR(UserExistsError);

// Malformed binary or text file. Carries the 1-based line number for text
// formats (0 when not applicable).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

#undef MOVIEBOT_DEFINE_ERROR

}  // namespace moviebot
