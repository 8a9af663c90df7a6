#ifndef SPEECHSEG_H
#define SPEECHSEG_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SsAlgorithm {
  SS_ALGORITHM_PROPOSED = 0,
  SS_ALGORITHM_PDAC = 1,
  SS_ALGORITHM_PTHR = 2,
  SS_ALGORITHM_FIXED = 3,
} SsAlgorithm;

// Result code of every fallible call.
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_UTF8 = 2,
  SS_STATUS_INVALID_ARGUMENT = 3,
  SS_STATUS_OUT_OF_RANGE = 4,
  SS_STATUS_SEGMENTATION_FAILED = 5,
  SS_STATUS_EVAL_FAILED = 6,
  SS_STATUS_PANIC = 99,
} SsStatus;

// Frame probabilities of one audio.
typedef struct SsProbs SsProbs;

// Segments of one audio plus the splits that produced them.
typedef struct SsSegments SsSegments;

// Segmenter settings. Durations are in seconds.
typedef struct SsConfig {
  enum SsAlgorithm algorithm;
  double threshold;
  double min_len_s;
  double max_len_s;
  double expand_s;
} SsConfig;

typedef struct SsWerReport {
  size_t substitutions;
  size_t deletions;
  size_t insertions;
  size_t reference_words;
  double wer;
} SsWerReport;

typedef struct SsBleuReport {
  double score;
  // Per-order n-gram precisions in percent.
  double precisions[4];
  double brevity_penalty;
  size_t sys_len;
  size_t ref_len;
} SsBleuReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ss_version(void);

// Message of the last failed call on this thread, or NULL if none failed.
// The pointer stays valid until the next failing call on the same thread.
const char *ss_last_error_message(void);

// Defaults: proposed algorithm, threshold 0.5, minimum 0.2 s, expansion 0.06 s.
struct SsConfig ss_config_default(double max_len_s);

// Copies `len` probabilities into a new handle. Values must lie in [0, 1]
// and `stride_s` must be positive.
//
// # Safety
// `audio_id` must be a NUL-terminated string, `probs` must point to `len`
// readable doubles (or may be NULL when `len` is 0) and `out` must be writable.
enum SsStatus ss_probs_new(const char *audio_id,
                           double stride_s,
                           const double *probs,
                           size_t len,
                           struct SsProbs **out);

// # Safety
// `probs` must be NULL or a handle from `ss_probs_new` not yet freed.
void ss_probs_free(struct SsProbs *probs);

// Number of frames, 0 for NULL.
//
// # Safety
// `probs` must be NULL or a live handle.
size_t ss_probs_len(const struct SsProbs *probs);

// Segments `probs` with `config` into a new handle.
//
// # Safety
// `probs` must be a live handle, `config` readable and `out` writable.
enum SsStatus ss_segment(const struct SsProbs *probs,
                         const struct SsConfig *config,
                         struct SsSegments **out);

// # Safety
// `segments` must be NULL or a handle from `ss_segment` not yet freed.
void ss_segments_free(struct SsSegments *segments);

// Number of segments, 0 for NULL.
//
// # Safety
// `segments` must be NULL or a live handle.
size_t ss_segments_len(const struct SsSegments *segments);

// Start and end in seconds of segment `index`.
//
// # Safety
// `segments` must be a live handle; `start_s` and `end_s` must be writable.
enum SsStatus ss_segments_get(const struct SsSegments *segments,
                              size_t index,
                              double *start_s,
                              double *end_s);

// Number of splits made while enforcing the maximum length.
//
// # Safety
// `segments` must be NULL or a live handle.
size_t ss_segments_split_count(const struct SsSegments *segments);

// Split `index`: the cut time in seconds and the probability there.
//
// # Safety
// `segments` must be a live handle; `t_hat_s` and `p_min` must be writable.
enum SsStatus ss_segments_split_get(const struct SsSegments *segments,
                                    size_t index,
                                    double *t_hat_s,
                                    double *p_min);

// Segments as JSON lines (`{"audio_id","start","end"}`, millisecond
// precision). Free the string with `ss_string_free`.
//
// # Safety
// `segments` must be a live handle and `out` writable.
enum SsStatus ss_segments_to_jsonl(const struct SsSegments *segments, char **out);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void ss_string_free(char *s);

// Corpus WER over newline-separated, line-aligned texts.
//
// # Safety
// `reference` and `hypothesis` must be NUL-terminated strings and `out` writable.
enum SsStatus ss_wer(const char *reference, const char *hypothesis, struct SsWerReport *out);

// Corpus BLEU over newline-separated, line-aligned texts.
//
// # Safety
// `reference` and `hypothesis` must be NUL-terminated strings and `out` writable.
enum SsStatus ss_bleu(const char *reference,
                      const char *hypothesis,
                      bool effective_order,
                      struct SsBleuReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPEECHSEG_H */
