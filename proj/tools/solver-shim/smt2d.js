#!/usr/bin/env node
// SMT-LIB 2 front end over the z3-solver WASM build. Reads one command per
// line on stdin, evaluates it against a single persistent context (so
// push/pop and incremental assertions behave like `z3 -in`), and writes the
// solver's output to stdout. Used as the default solver when no native SMT
// solver binary is installed.
'use strict';

const { init } = require('z3-solver');

// `(echo "...")` answered here rather than in the solver: the session
// handshake rides on echo, and availability probing must not depend on the
// WASM bridge being healthy.
const ECHO = /^\s*\(echo\s+"([^"\\]*)"\s*\)\s*$/;

async function main() {
  const { em, Z3 } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  Z3.del_config(cfg);

  // The library's eval wrapper passes the command through ccall's 'string'
  // conversion, which stack-allocates the bytes and releases them as soon as
  // the call returns. The solver parses the text later, on a worker thread,
  // so under unlucky scheduling it reads reused stack memory: commands get
  // truncated mid-parse or the worker dies and the promise never settles.
  // Copying the command into the WASM heap and passing the raw pointer keeps
  // the bytes alive until the evaluation finishes.
  const evalSmt2 = async (text) => {
    const bytes = Buffer.from(text, 'utf8');
    const ptr = em._malloc(bytes.length + 1);
    try {
      em.HEAPU8.set(bytes, ptr);
      em.HEAPU8[ptr + bytes.length] = 0;
      return await em.async_call(em._async_Z3_eval_smtlib2_string, ctx, ptr);
    } finally {
      em._free(ptr);
    }
  };

  let buf = '';
  let queue = Promise.resolve();

  const run = async (line) => {
    const echo = ECHO.exec(line);
    if (echo) {
      process.stdout.write(echo[1] + '\n');
      return;
    }
    let out;
    try {
      out = await evalSmt2(line);
    } catch (e) {
      out = `(error "smt2d: ${String(e).replace(/"/g, "'")}")`;
    }
    if (out && out.length > 0) {
      process.stdout.write(out.endsWith('\n') ? out : out + '\n');
    }
  };

  process.stdin.setEncoding('utf8');
  process.stdin.on('data', (chunk) => {
    buf += chunk;
    let nl;
    while ((nl = buf.indexOf('\n')) >= 0) {
      const line = buf.slice(0, nl);
      buf = buf.slice(nl + 1);
      if (line.trim().length === 0) continue;
      queue = queue.then(() => run(line));
    }
  });
  process.stdin.on('end', () => {
    queue.then(() => process.exit(0));
  });
}

main().catch((e) => {
  process.stderr.write(`smt2d: failed to initialize z3: ${e}\n`);
  process.exit(1);
});
