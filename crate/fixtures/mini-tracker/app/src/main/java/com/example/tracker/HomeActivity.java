package com.example.tracker;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.view.View;
import android.widget.Button;
import android.widget.TextView;

public class HomeActivity extends Activity implements View.OnClickListener {
    private static final String KEY_MODE = "mode";

    private TextView distance;
    private Button start;

    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.home);
        distance = (TextView) findViewById(R.id.home_distance);
        start = (Button) findViewById(R.id.home_start);
        final Button history = (Button) findViewById(R.id.home_history);
        start.setOnClickListener(this);
        history.setOnClickListener(new View.OnClickListener() {
            @Override
            public void onClick(View v) {
                startActivity(new Intent(HomeActivity.this, HistoryActivity.class));
            }
        });
        distance.setText(getString(R.string.zero_km));
    }

    @Override
    public void onClick(View v) {
        Intent run = new Intent(this, RunActivity.class);
        run.putExtra(KEY_MODE, 2);
        run.putExtra("started_at", System.currentTimeMillis());
        startActivity(run);
    }
}
