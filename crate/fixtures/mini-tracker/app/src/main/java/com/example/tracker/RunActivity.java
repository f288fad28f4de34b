package com.example.tracker;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.view.View;
import android.widget.Chronometer;
import android.widget.TextView;

import java.text.SimpleDateFormat;
import java.util.Date;

public class RunActivity extends Activity {
    private Chronometer clock;
    private TextView started;
    private boolean paused;

    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.run);
        clock = (Chronometer) findViewById(R.id.run_clock);
        started = (TextView) findViewById(R.id.run_started);
        long at = getIntent().getLongExtra("started_at", 0L);
        started.setText(new SimpleDateFormat("dd.MM.yyyy HH:mm").format(new Date(at)));
        findViewById(R.id.run_pause).setOnClickListener(v -> togglePause());
        startService(new Intent(this, GpsService.class));
    }

    private void togglePause() {
        paused = !paused;
        clock.setVisibility(paused ? View.INVISIBLE : View.VISIBLE);
        findViewById(R.id.run_paused_banner).setVisibility(View.VISIBLE);
    }
}
