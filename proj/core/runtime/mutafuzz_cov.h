/*
 * Copyright 2026 The mutafuzz Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Coverage probes for instrumented sources.
 *
 * An instrumented translation unit defines MUTAFUZZ_COV_UNIT and
 * MUTAFUZZ_COV_STMTS and includes this header twice: once at the top for
 * the probe declarations, which need no system headers, and once at the
 * end with MUTAFUZZ_COV_IMPL defined for the flushing code. Statement
 * counters are per translation unit; the edge map is shared by all units
 * of a program. Counters are written at exit and on fatal signals:
 *   statements of unit 0  -> $MUTAFUZZ_COV_FILE
 *   statements of unit k  -> $MUTAFUZZ_COV_FILE.k
 *   edges                 -> $MUTAFUZZ_EDGE_FILE
 * File layout: "MFCV", u32 version (1), u32 n, n x u64, little endian.
 * Existing statement files with the same n are accumulated into, so a test
 * that runs the program several times gets the sum.
 */
#ifndef MUTAFUZZ_COV_DECLS_
#define MUTAFUZZ_COV_DECLS_

#ifndef MUTAFUZZ_COV_UNIT
#define MUTAFUZZ_COV_UNIT 0
#endif
#ifndef MUTAFUZZ_COV_STMTS
#define MUTAFUZZ_COV_STMTS 0
#endif

#define MUTAFUZZ_EDGE_BUCKETS 65536
#define MUTAFUZZ_MAX_UNITS 256

__attribute__((weak)) unsigned long long __mf_edges[MUTAFUZZ_EDGE_BUCKETS];
__attribute__((weak)) unsigned int __mf_prev;

__attribute__((unused)) static unsigned long long __mf_stmt[MUTAFUZZ_COV_STMTS > 0 ? MUTAFUZZ_COV_STMTS : 1];

__attribute__((unused)) static inline void __mf_edge(unsigned int cur) {
  __mf_edges[((__mf_prev * 2u) ^ cur) % MUTAFUZZ_EDGE_BUCKETS]++;
  __mf_prev = cur;
}

#endif /* MUTAFUZZ_COV_DECLS_ */

#if defined(MUTAFUZZ_COV_IMPL) && !defined(MUTAFUZZ_COV_IMPL_DONE_)
#define MUTAFUZZ_COV_IMPL_DONE_

#include <signal.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

typedef void (*__mf_flush_fn)(void);

__attribute__((weak)) __mf_flush_fn __mf_flushers[MUTAFUZZ_MAX_UNITS];
__attribute__((weak)) int __mf_nflushers;
__attribute__((weak)) int __mf_installed;
__attribute__((weak)) volatile int __mf_flushed;

__attribute__((unused)) static void __mf_put_u32(unsigned char* out, unsigned long v) {
  out[0] = (unsigned char)(v & 0xff);
  out[1] = (unsigned char)((v >> 8) & 0xff);
  out[2] = (unsigned char)((v >> 16) & 0xff);
  out[3] = (unsigned char)((v >> 24) & 0xff);
}

__attribute__((unused)) static void __mf_put_u64(unsigned char* out, unsigned long long v) {
  int i;
  for (i = 0; i < 8; i++) out[i] = (unsigned char)((v >> (8 * i)) & 0xff);
}

__attribute__((unused)) static unsigned long long __mf_get_u64(const unsigned char* in) {
  unsigned long long v = 0;
  int i;
  for (i = 7; i >= 0; i--) v = (v << 8) | in[i];
  return v;
}

__attribute__((unused)) static void __mf_write_counts(const char* path, const unsigned long long* counts,
                              unsigned long n, int accumulate) {
  unsigned char header[12];
  unsigned char cell[8];
  unsigned long i;
  FILE* f;
  unsigned long long* sum = NULL;
  if (accumulate) {
    f = fopen(path, "rb");
    if (f != NULL) {
      if (fread(header, 1, 12, f) == 12 && memcmp(header, "MFCV", 4) == 0 &&
          (unsigned long)header[8] + ((unsigned long)header[9] << 8) +
                  ((unsigned long)header[10] << 16) + ((unsigned long)header[11] << 24) ==
              n) {
        sum = (unsigned long long*)calloc(n > 0 ? n : 1, sizeof(unsigned long long));
        for (i = 0; sum != NULL && i < n; i++) {
          if (fread(cell, 1, 8, f) != 8) break;
          sum[i] = __mf_get_u64(cell);
        }
      }
      fclose(f);
    }
  }
  f = fopen(path, "wb");
  if (f == NULL) {
    free(sum);
    return;
  }
  memcpy(header, "MFCV", 4);
  __mf_put_u32(header + 4, 1);
  __mf_put_u32(header + 8, n);
  fwrite(header, 1, 12, f);
  for (i = 0; i < n; i++) {
    __mf_put_u64(cell, counts[i] + (sum != NULL ? sum[i] : 0));
    fwrite(cell, 1, 8, f);
  }
  fclose(f);
  free(sum);
}

__attribute__((unused)) static void __mf_flush_unit(void) {
  const char* base = getenv("MUTAFUZZ_COV_FILE");
  char path[4096];
  if (base == NULL || MUTAFUZZ_COV_STMTS == 0) return;
  if (MUTAFUZZ_COV_UNIT == 0) {
    snprintf(path, sizeof(path), "%s", base);
  } else {
    snprintf(path, sizeof(path), "%s.%d", base, MUTAFUZZ_COV_UNIT);
  }
  __mf_write_counts(path, __mf_stmt, (unsigned long)MUTAFUZZ_COV_STMTS, 1);
}

__attribute__((unused)) static void __mf_flush_all(void) {
  const char* edges = getenv("MUTAFUZZ_EDGE_FILE");
  int i;
  if (__mf_flushed) return;
  __mf_flushed = 1;
  for (i = 0; i < __mf_nflushers; i++) __mf_flushers[i]();
  if (edges != NULL) __mf_write_counts(edges, __mf_edges, MUTAFUZZ_EDGE_BUCKETS, 0);
}

__attribute__((unused)) static void __mf_on_signal(int sig) {
  __mf_flush_all();
  signal(sig, SIG_DFL);
  raise(sig);
}

__attribute__((constructor)) static void __mf_register(void) {
  if (__mf_nflushers < MUTAFUZZ_MAX_UNITS) __mf_flushers[__mf_nflushers++] = __mf_flush_unit;
  if (!__mf_installed) {
    __mf_installed = 1;
    atexit(__mf_flush_all);
    signal(SIGABRT, __mf_on_signal);
    signal(SIGSEGV, __mf_on_signal);
    signal(SIGFPE, __mf_on_signal);
    signal(SIGBUS, __mf_on_signal);
    signal(SIGILL, __mf_on_signal);
    signal(SIGTERM, __mf_on_signal);
  }
}

#endif /* MUTAFUZZ_COV_IMPL */
