// Spawns a real backend server on a local port for the duration of the test
// run, so the fidelity tests talk to the actual public API rather than mocks.

import { spawn, type ChildProcess } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

const PORT = 8471;

async function waitForServer(url: string, timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${url}/v1/methods`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise(r => setTimeout(r, 200));
  }
  throw new Error(`backend did not come up at ${url}`);
}

export default async function setup(): Promise<() => void> {
  const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'votebench-ui-'));
  const outbox = path.join(tmp, 'outbox.jsonl');
  const proc: ChildProcess = spawn(
    'votebench',
    ['--store', path.join(tmp, 'events.log'), 'serve', '--host', '127.0.0.1', '--port', String(PORT)],
    {
      env: {
        ...process.env,
        VOTEBENCH_IDENTITY_PATH: path.join(tmp, 'identity.json'),
        VOTEBENCH_MAIL_FILE: outbox,
      },
      stdio: 'ignore',
    },
  );

  const url = `http://127.0.0.1:${PORT}`;
  await waitForServer(url);
  process.env.VOTEBENCH_TEST_URL = url;
  process.env.VOTEBENCH_TEST_OUTBOX = outbox;

  return () => {
    proc.kill();
    fs.rmSync(tmp, { recursive: true, force: true });
  };
}
