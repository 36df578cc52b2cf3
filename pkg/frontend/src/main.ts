import { ApiClient } from './api/client';
import { App } from './app';
import { renderApp } from './ui/screens';

// Same-origin by default; a deployment can point the UI at another host with
// <meta name="api-base" content="https://..."> as long as that host allows it.
function apiBase(): string {
  const meta = document.querySelector<HTMLMetaElement>('meta[name="api-base"]');
  return meta ? meta.content : '';
}

export function boot(root: HTMLElement): App {
  const app = new App(new ApiClient(apiBase()));
  const rerender = () => {
    root.replaceChildren(renderApp(app.store.get(), app));
  };
  app.store.subscribe(rerender);
  rerender();
  return app;
}

const container = document.getElementById('app');
if (container) {
  boot(container);
}
