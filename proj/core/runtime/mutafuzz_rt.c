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

#define MUTAFUZZ_NO_LOG_MACRO
#include "mutafuzz_rt.h"

#include <signal.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static unsigned char* g_data = NULL;
static unsigned long g_length = 0;
static unsigned long g_cursor = 0;
static FILE* g_log = NULL;

static void fail(const char* msg) {
  fprintf(stderr, "mutafuzz runtime: %s\n", msg);
  fflush(stderr);
  abort();
}

static FILE* log_stream(void) {
  const char* path;
  if (g_log != NULL) return g_log;
  path = getenv("MUTAFUZZ_LOG_FILE");
  if (path != NULL) g_log = fopen(path, "a");
  if (g_log == NULL) g_log = stderr;
  return g_log;
}

int load_file(const char* path) {
  FILE* f;
  unsigned long n = 0;
  size_t got;
  if (path == NULL || (f = fopen(path, "rb")) == NULL) {
    fprintf(stderr, "mutafuzz runtime: cannot read input file\n");
    exit(MUTAFUZZ_EXIT_UNREADABLE);
  }
  g_length = mutafuzz_required_size;
  g_data = (unsigned char*)calloc(g_length > 0 ? g_length : 1, 1);
  if (g_data == NULL) fail("out of memory");
  while (n < g_length && (got = fread(g_data + n, 1, g_length - n, f)) > 0) {
    n += (unsigned long)got;
  }
  if (ferror(f)) {
    fclose(f);
    exit(MUTAFUZZ_EXIT_UNREADABLE);
  }
  fclose(f);
  g_cursor = 0;
  return 0;
}

void get_value(void* dst, unsigned long size, int reserved) {
  if (reserved != 0) fail("reserved arg");
  if (size > g_length - g_cursor) fail("read past the end of the input");
  memcpy(dst, g_data + g_cursor, size);
  g_cursor += size;
}

void seek_data_index(unsigned long pos) {
  if (pos > g_length) fail("seek past the end of the input");
  g_cursor = pos;
}

int compare_value(const void* a, const void* b, unsigned long size) {
  return memcmp(a, b, size) == 0 ? 0 : 1;
}

void mutafuzz_log(const char* msg) {
  FILE* f = log_stream();
  fputs(msg, f);
  fputc('\n', f);
  fflush(f);
}

void safe_abort(void) {
  if (g_log != NULL) fflush(g_log);
  fflush(stdout);
  fflush(stderr);
  abort();
}

void dump_value(const char* name, const void* value, unsigned long size) {
  const char* path = getenv("MUTAFUZZ_DUMP_FILE");
  const unsigned char* bytes = (const unsigned char*)value;
  unsigned long i;
  FILE* f;
  if (path == NULL) return;
  f = fopen(path, "a");
  if (f == NULL) return;
  fprintf(f, "%s ", name);
  for (i = 0; i < size; i++) fprintf(f, "%02x", bytes[i]);
  fputc('\n', f);
  fclose(f);
}
